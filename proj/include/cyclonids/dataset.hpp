#pragma once

#include "cyclonids/matrix.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cyclonids {

enum class SchemaId { kdd99, nslkdd, ugransome, synthetic };

std::string_view to_string(SchemaId id);
SchemaId parse_schema_id(std::string_view name);

enum class ColumnKind { numeric, categorical, label };

struct ColumnSchema {
    std::string name;
    ColumnKind kind = ColumnKind::numeric;
    std::size_t position = 0;
    // Parsed for arity checks but discarded (NSL-KDD difficulty level).
    bool dropped = false;
    // Alternative header spellings used to reorder columns when a header row is present.
    std::vector<std::string> aliases;
};

class DatasetSchema {
public:
    SchemaId id = SchemaId::synthetic;
    std::vector<ColumnSchema> columns;
    std::vector<std::string> class_names;

    std::size_t arity() const noexcept { return columns.size(); }
    std::size_t label_position() const;

    // Maps a raw label token onto a class index, or nullopt when the token is unknown.
    std::optional<std::size_t> label_index(std::string_view token) const;

    // Throws ConfigError if the column invariants do not hold.
    void validate() const;
};

DatasetSchema kdd99_schema();
DatasetSchema nslkdd_schema();
DatasetSchema ugransome_schema();
DatasetSchema synthetic_schema(std::size_t n_features, std::size_t n_classes);
DatasetSchema schema_by_id(SchemaId id);

// Maps a KDD'99 attack token (e.g. "smurf.", "guess_passwd") onto
// {Normal, DoS, Probe, U2R, R2L}.
std::optional<std::size_t> kdd_attack_category(std::string_view token);

// One feature column before categorical encoding.
struct RawColumn {
    std::string name;
    ColumnKind kind = ColumnKind::numeric;
    std::vector<double> numbers;      // kind == numeric
    std::vector<std::string> tokens;  // kind == categorical
};

// A loaded table whose categorical columns still hold tokens.
struct RawDataset {
    SchemaId schema = SchemaId::synthetic;
    std::vector<RawColumn> columns;
    std::vector<std::size_t> labels;
    std::vector<std::string> class_names;

    std::size_t rows() const noexcept { return labels.size(); }
    RawDataset select_rows(std::span<const std::size_t> idx) const;
};

enum class EncodingStrategy { onehot, ordinal };

std::string_view to_string(EncodingStrategy s);

struct CategoricalEncoding {
    std::string column;
    EncodingStrategy strategy = EncodingStrategy::onehot;
    std::vector<std::string> levels;  // first-seen order
    std::size_t first_output = 0;     // first encoded column in the feature matrix
    std::size_t width = 1;            // encoded column count (levels + unknown for onehot)

    // Encoded output column (onehot) or value (ordinal) for a token;
    // unseen tokens map to the reserved unknown bucket at index levels.size().
    std::size_t bucket(std::string_view token) const;
};

// Fully numeric dataset consumed by every downstream stage.
struct Dataset {
    Matrix features;
    std::vector<std::size_t> labels;
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;
    SchemaId schema = SchemaId::synthetic;
    std::vector<CategoricalEncoding> encoding_map;

    std::size_t rows() const noexcept { return features.rows(); }
    std::size_t cols() const noexcept { return features.cols(); }

    Dataset select_rows(std::span<const std::size_t> idx) const;
    Dataset select_features(std::span<const std::size_t> idx) const;

    // Throws DataError if shape, label or finiteness invariants fail.
    void validate() const;
};

RawDataset load_csv(const std::filesystem::path& path, const DatasetSchema& schema);
RawDataset parse_csv(std::string_view text, const DatasetSchema& schema);

// Loads a CSV whose last column is the label and every other column is
// numeric; the feature count is taken from the file.
RawDataset load_synthetic_csv(const std::filesystem::path& path);

// Writes a numeric dataset as CSV (header row, label token last) such that
// load_synthetic_csv restores it bit-for-bit.
void write_csv(const Dataset& d, const std::filesystem::path& path);
std::string to_csv(const Dataset& d);

// Learns category levels on one table and applies them to others.
class Encoder {
public:
    // max_levels > 0 keeps only the most frequent levels of a onehot column
    // (frequency ties broken by first-seen order); the rest share the unknown bucket.
    static Encoder fit(const RawDataset& raw, EncodingStrategy strategy, std::size_t max_levels = 0);

    Dataset apply(const RawDataset& raw) const;

    EncodingStrategy strategy() const noexcept { return strategy_; }
    const std::vector<CategoricalEncoding>& encodings() const noexcept { return encodings_; }
    const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }

private:
    EncodingStrategy strategy_ = EncodingStrategy::onehot;
    std::vector<CategoricalEncoding> encodings_;
    std::vector<std::string> feature_names_;
    std::vector<std::string> source_columns_;
};

Dataset encode_categoricals(const RawDataset& raw, EncodingStrategy strategy);

// Wraps an already numeric table (no categorical columns) as a Dataset.
Dataset to_dataset(const RawDataset& raw);

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Test size is round-half-up(n * test_fraction), clamped to [1, n-1].
std::size_t test_count(std::size_t n, double test_fraction);
SplitIndices split_indices(std::size_t n, double test_fraction, std::uint64_t seed);

struct SplitPair {
    Dataset train;
    Dataset test;
    SplitIndices indices;
    std::uint64_t seed = 0;
    double test_fraction = 0.2;
};

SplitPair split(const Dataset& d, double test_fraction, std::uint64_t seed);

// Per-class counts in class-index order.
std::vector<std::size_t> class_counts(std::span<const std::size_t> labels, std::size_t n_classes);

std::map<std::string, std::size_t> class_distribution(std::span<const std::size_t> labels,
                                                      std::span<const std::string> class_names);
std::map<std::string, std::size_t> class_distribution(const Dataset& d);

// Occurrence counts of every token in each categorical column.
std::map<std::string, std::map<std::string, std::size_t>> categorical_counts(const RawDataset& raw);

} // namespace cyclonids
