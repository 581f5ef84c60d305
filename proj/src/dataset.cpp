#include "cyclonids/dataset.hpp"

#include "cyclonids/errors.hpp"
#include "cyclonids/io.hpp"
#include "cyclonids/rng.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace cyclonids {

namespace {

constexpr std::array kKddFeatureNames = {
    "duration", "protocol_type", "service", "flag", "src_bytes", "dst_bytes", "land",
    "wrong_fragment", "urgent", "hot", "num_failed_logins", "logged_in", "num_compromised",
    "root_shell", "su_attempted", "num_root", "num_file_creations", "num_shells",
    "num_access_files", "num_outbound_cmds", "is_host_login", "is_guest_login", "count",
    "srv_count", "serror_rate", "srv_serror_rate", "rerror_rate", "srv_rerror_rate",
    "same_srv_rate", "diff_srv_rate", "srv_diff_host_rate", "dst_host_count",
    "dst_host_srv_count", "dst_host_same_srv_rate", "dst_host_diff_srv_rate",
    "dst_host_same_src_port_rate", "dst_host_srv_diff_host_rate", "dst_host_serror_rate",
    "dst_host_srv_serror_rate", "dst_host_rerror_rate", "dst_host_srv_rerror_rate",
};
static_assert(kKddFeatureNames.size() == 41);

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Lowercase with everything but letters and digits removed.
std::string fold(std::string_view s) {
    std::string out;
    for (char c : s)
        if (std::isalnum(static_cast<unsigned char>(c)))
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

// Grouped digits ("1819 000") are accepted by dropping internal whitespace.
std::optional<double> parse_number(std::string_view field) {
    std::string compact;
    compact.reserve(field.size());
    for (char c : field)
        if (!std::isspace(static_cast<unsigned char>(c))) compact.push_back(c);
    if (compact.empty()) return std::nullopt;
    const char* first = compact.data();
    const char* last = compact.data() + compact.size();
    if (*first == '+') ++first;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) return std::nullopt;
    return value;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

struct Line {
    std::size_t number;  // 1-based
    std::string_view text;
};

std::vector<Line> split_lines(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
    std::vector<Line> lines;
    std::size_t number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        ++number;
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!trim(line).empty()) lines.push_back({number, line});
        start = end + 1;
    }
    return lines;
}

std::string read_file(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec))
        throw DataError(DataErrorKind::file_missing, "file not found: " + path.string());
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(DataErrorKind::file_missing, "cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string strip_label_token(std::string_view token) {
    token = trim(token);
    if (token.ends_with('.')) token.remove_suffix(1);
    return std::string(trim(token));
}

} // namespace

std::string_view to_string(SchemaId id) {
    switch (id) {
    case SchemaId::kdd99: return "kdd99";
    case SchemaId::nslkdd: return "nslkdd";
    case SchemaId::ugransome: return "ugransome";
    case SchemaId::synthetic: return "synthetic";
    }
    return "unknown";
}

SchemaId parse_schema_id(std::string_view name) {
    const auto f = fold(name);
    if (f == "kdd99") return SchemaId::kdd99;
    if (f == "nslkdd") return SchemaId::nslkdd;
    if (f == "ugransome") return SchemaId::ugransome;
    if (f == "synthetic") return SchemaId::synthetic;
    throw ConfigError("unknown schema '" + std::string(name) + "'");
}

std::string_view to_string(EncodingStrategy s) {
    return s == EncodingStrategy::onehot ? "onehot" : "ordinal";
}

std::optional<std::size_t> kdd_attack_category(std::string_view token) {
    // Class indices: 0 Normal, 1 DoS, 2 Probe, 3 U2R, 4 R2L.
    static const std::unordered_map<std::string, std::size_t> table = [] {
        std::unordered_map<std::string, std::size_t> t;
        auto add = [&](std::size_t cls, std::initializer_list<const char*> names) {
            for (const char* n : names) t.emplace(fold(n), cls);
        };
        add(0, {"normal"});
        add(1, {"back", "land", "neptune", "pod", "smurf", "teardrop", "apache2", "mailbomb",
                "processtable", "udpstorm"});
        add(2, {"ipsweep", "nmap", "portsweep", "satan", "mscan", "saint"});
        add(3, {"buffer_overflow", "loadmodule", "perl", "rootkit", "httptunnel", "ps",
                "sqlattack", "xterm"});
        add(4, {"ftp_write", "guess_passwd", "guesspassword", "imap", "multihop", "phf", "spy",
                "warezclient", "warezmaster", "named", "sendmail", "snmpgetattack", "snmpguess",
                "worm", "xlock", "xsnoop"});
        return t;
    }();
    const auto it = table.find(fold(strip_label_token(token)));
    if (it == table.end()) return std::nullopt;
    return it->second;
}

std::size_t DatasetSchema::label_position() const {
    for (const auto& c : columns)
        if (c.kind == ColumnKind::label) return c.position;
    throw ConfigError("schema has no label column");
}

std::optional<std::size_t> DatasetSchema::label_index(std::string_view token) const {
    const std::string stripped = strip_label_token(token);
    switch (id) {
    case SchemaId::kdd99:
    case SchemaId::nslkdd:
        return kdd_attack_category(stripped);
    case SchemaId::ugransome: {
        const auto f = fold(stripped);
        if (f == "s" || f == "signature") return 0;
        if (f == "ss" || f == "syntheticsignature") return 1;
        if (f == "a" || f == "anomaly") return 2;
        return std::nullopt;
    }
    case SchemaId::synthetic: {
        for (std::size_t i = 0; i < class_names.size(); ++i)
            if (stripped == class_names[i]) return i;
        std::size_t v = 0;
        auto [ptr, ec] = std::from_chars(stripped.data(), stripped.data() + stripped.size(), v);
        if (ec == std::errc{} && ptr == stripped.data() + stripped.size() && v < class_names.size())
            return v;
        return std::nullopt;
    }
    }
    return std::nullopt;
}

void DatasetSchema::validate() const {
    std::size_t labels = 0;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].position != i)
            throw ConfigError("schema column positions must be contiguous from 0");
        if (columns[i].kind == ColumnKind::label) ++labels;
    }
    if (labels != 1) throw ConfigError("schema must have exactly one label column");
    if (class_names.empty()) throw ConfigError("schema has no class names");
}

namespace {

DatasetSchema kdd_like(SchemaId id, bool with_difficulty) {
    DatasetSchema s;
    s.id = id;
    for (std::size_t i = 0; i < kKddFeatureNames.size(); ++i) {
        const bool categorical = (i == 1 || i == 2 || i == 3);
        s.columns.push_back({kKddFeatureNames[i],
                             categorical ? ColumnKind::categorical : ColumnKind::numeric, i, false, {}});
    }
    s.columns.push_back({"label", ColumnKind::label, 41, false, {"attack", "class", "labels"}});
    if (with_difficulty)
        s.columns.push_back({"difficulty", ColumnKind::numeric, 42, true, {"level", "difficulty_level"}});
    s.class_names = {"Normal", "DoS", "Probe", "U2R", "R2L"};
    return s;
}

} // namespace

DatasetSchema kdd99_schema() { return kdd_like(SchemaId::kdd99, false); }
DatasetSchema nslkdd_schema() { return kdd_like(SchemaId::nslkdd, true); }

DatasetSchema ugransome_schema() {
    DatasetSchema s;
    s.id = SchemaId::ugransome;
    using K = ColumnKind;
    s.columns = {
        {"Prediction", K::label, 0, false, {}},
        {"Ransomware", K::categorical, 1, false, {"Family"}},
        {"Bitcoins", K::numeric, 2, false, {"BTC", "Bitcoins (BTC)"}},
        {"Dollars", K::numeric, 3, false, {"USD", "Dollars (USD)"}},
        {"Cluster", K::numeric, 4, false, {"Clusters"}},
        {"Seed Address", K::categorical, 5, false, {"SeddAddress", "SeedAddress"}},
        {"Expended Address", K::categorical, 6, false, {"ExpAddress"}},
        {"Port", K::numeric, 7, false, {}},
        {"Malware", K::categorical, 8, false, {"Threats"}},
        {"Network traffic", K::numeric, 9, false, {"Netflows", "Netflow_Bytes"}},
        {"IP address", K::categorical, 10, false, {"IPaddress"}},
        {"Flag", K::categorical, 11, false, {}},
        {"Protocol", K::categorical, 12, false, {"Protcol"}},
        {"Timestamp", K::numeric, 13, false, {"Time"}},
    };
    s.class_names = {"Signature", "SyntheticSignature", "Anomaly"};
    return s;
}

DatasetSchema synthetic_schema(std::size_t n_features, std::size_t n_classes) {
    DatasetSchema s;
    s.id = SchemaId::synthetic;
    for (std::size_t i = 0; i < n_features; ++i)
        s.columns.push_back({"f" + std::to_string(i), ColumnKind::numeric, i, false, {}});
    s.columns.push_back({"label", ColumnKind::label, n_features, false, {}});
    for (std::size_t c = 0; c < n_classes; ++c) s.class_names.push_back("c" + std::to_string(c));
    return s;
}

DatasetSchema schema_by_id(SchemaId id) {
    switch (id) {
    case SchemaId::kdd99: return kdd99_schema();
    case SchemaId::nslkdd: return nslkdd_schema();
    case SchemaId::ugransome: return ugransome_schema();
    case SchemaId::synthetic:
        throw ConfigError("the synthetic schema depends on the data; use synthetic_schema(p, k)");
    }
    throw ConfigError("unknown schema");
}

RawDataset parse_csv(std::string_view text, const DatasetSchema& schema) {
    schema.validate();
    const auto lines = split_lines(text);
    if (lines.empty()) throw DataError(DataErrorKind::empty_file, "file has no rows");

    const std::size_t arity = schema.arity();
    // source[f] = schema column stored at file position f.
    std::vector<std::size_t> source(arity);
    for (std::size_t i = 0; i < arity; ++i) source[i] = i;

    std::size_t first_data = 0;
    {
        const auto fields = split_fields(lines[0].text);
        bool header = false;
        if (fields.size() == arity) {
            for (std::size_t i = 0; i < arity && !header; ++i) {
                const auto& col = schema.columns[i];
                if (col.kind == ColumnKind::numeric && !parse_number(fields[i])) header = true;
            }
        } else {
            header = true;
        }
        if (header && fields.size() == arity) {
            first_data = 1;
            // Reorder when the header names every schema column exactly once.
            std::vector<std::size_t> mapping(arity, arity);
            bool complete = true;
            for (std::size_t f = 0; f < arity && complete; ++f) {
                const auto key = fold(fields[f]);
                for (const auto& col : schema.columns) {
                    bool match = fold(col.name) == key;
                    for (const auto& a : col.aliases) match = match || fold(a) == key;
                    if (match) {
                        mapping[f] = col.position;
                        break;
                    }
                }
                complete = mapping[f] < arity;
            }
            if (complete) {
                auto sorted = mapping;
                std::sort(sorted.begin(), sorted.end());
                if (std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end()) source = mapping;
            }
        } else if (header) {
            throw DataError(DataErrorKind::arity_mismatch,
                            "row " + std::to_string(lines[0].number) + ": expected " +
                                std::to_string(arity) + " fields, got " + std::to_string(fields.size()),
                            lines[0].number);
        }
    }
    if (first_data >= lines.size()) throw DataError(DataErrorKind::empty_file, "file has a header but no rows");

    RawDataset raw;
    raw.schema = schema.id;
    raw.class_names = schema.class_names;
    // column_slot[schema position] = index into raw.columns, or npos for label/dropped.
    constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::vector<std::size_t> column_slot(arity, npos);
    for (const auto& col : schema.columns) {
        if (col.kind == ColumnKind::label || col.dropped) continue;
        column_slot[col.position] = raw.columns.size();
        raw.columns.push_back({col.name, col.kind, {}, {}});
    }
    const std::size_t n_rows = lines.size() - first_data;
    for (auto& c : raw.columns) {
        if (c.kind == ColumnKind::numeric) c.numbers.reserve(n_rows);
        else c.tokens.reserve(n_rows);
    }
    raw.labels.reserve(n_rows);

    for (std::size_t li = first_data; li < lines.size(); ++li) {
        const auto& line = lines[li];
        const auto fields = split_fields(line.text);
        if (fields.size() != arity)
            throw DataError(DataErrorKind::arity_mismatch,
                            "row " + std::to_string(line.number) + ": expected " + std::to_string(arity) +
                                " fields, got " + std::to_string(fields.size()),
                            line.number);
        for (std::size_t f = 0; f < arity; ++f) {
            const auto& col = schema.columns[source[f]];
            if (col.kind == ColumnKind::label) {
                const auto idx = schema.label_index(fields[f]);
                if (!idx)
                    throw DataError(DataErrorKind::unknown_label,
                                    "row " + std::to_string(line.number) + ": unknown label '" +
                                        std::string(fields[f]) + "'",
                                    line.number);
                raw.labels.push_back(*idx);
                continue;
            }
            if (col.dropped) continue;
            auto& out = raw.columns[column_slot[col.position]];
            if (col.kind == ColumnKind::numeric) {
                const auto v = parse_number(fields[f]);
                if (!v)
                    throw DataError(DataErrorKind::bad_numeric,
                                    "row " + std::to_string(line.number) + ": column '" + col.name +
                                        "' is not numeric: '" + std::string(fields[f]) + "'",
                                    line.number);
                out.numbers.push_back(*v);
            } else {
                out.tokens.emplace_back(fields[f]);
            }
        }
    }
    return raw;
}

RawDataset load_csv(const std::filesystem::path& path, const DatasetSchema& schema) {
    return parse_csv(read_file(path), schema);
}

RawDataset load_synthetic_csv(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    const auto lines = split_lines(text);
    if (lines.empty()) throw DataError(DataErrorKind::empty_file, "file has no rows");
    const auto first = split_fields(lines[0].text);
    if (first.size() < 2)
        throw DataError(DataErrorKind::arity_mismatch, "synthetic CSV needs at least one feature and a label",
                        lines[0].number);
    const std::size_t p = first.size() - 1;
    bool header = false;
    for (std::size_t i = 0; i < p; ++i) header = header || !parse_number(first[i]);

    // Class count: largest class index seen plus one.
    std::size_t n_classes = 0;
    for (std::size_t li = header ? 1 : 0; li < lines.size(); ++li) {
        const auto fields = split_fields(lines[li].text);
        if (fields.empty()) continue;
        std::string_view tok = fields.back();
        if (tok.starts_with('c')) tok.remove_prefix(1);
        std::size_t v = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || ptr != tok.data() + tok.size())
            throw DataError(DataErrorKind::unknown_label,
                            "row " + std::to_string(lines[li].number) + ": synthetic labels must be c<k> or <k>",
                            lines[li].number);
        n_classes = std::max(n_classes, v + 1);
    }
    auto schema = synthetic_schema(p, std::max<std::size_t>(n_classes, 2));
    if (header)
        for (std::size_t i = 0; i < p; ++i) schema.columns[i].name = std::string(first[i]);
    return parse_csv(text, schema);
}

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError(DataErrorKind::io_write_failure, "cannot write " + tmp.string());
        out << content;
        if (!out) throw DataError(DataErrorKind::io_write_failure, "write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw DataError(DataErrorKind::io_write_failure, "cannot rename to " + path.string());
}

std::string to_csv(const Dataset& d) {
    std::string out;
    for (std::size_t j = 0; j < d.cols(); ++j) {
        out += d.feature_names.size() == d.cols() ? d.feature_names[j] : "f" + std::to_string(j);
        out += ',';
    }
    out += "label\n";
    for (std::size_t i = 0; i < d.rows(); ++i) {
        for (std::size_t j = 0; j < d.cols(); ++j) {
            out += format_double(d.features(i, j));
            out += ',';
        }
        out += 'c' + std::to_string(d.labels[i]);
        out += '\n';
    }
    return out;
}

void write_csv(const Dataset& d, const std::filesystem::path& path) { write_file_atomic(path, to_csv(d)); }

RawDataset RawDataset::select_rows(std::span<const std::size_t> idx) const {
    RawDataset out;
    out.schema = schema;
    out.class_names = class_names;
    out.labels.reserve(idx.size());
    for (auto i : idx) out.labels.push_back(labels[i]);
    for (const auto& c : columns) {
        RawColumn rc{c.name, c.kind, {}, {}};
        if (c.kind == ColumnKind::numeric) {
            rc.numbers.reserve(idx.size());
            for (auto i : idx) rc.numbers.push_back(c.numbers[i]);
        } else {
            rc.tokens.reserve(idx.size());
            for (auto i : idx) rc.tokens.push_back(c.tokens[i]);
        }
        out.columns.push_back(std::move(rc));
    }
    return out;
}

std::size_t CategoricalEncoding::bucket(std::string_view token) const {
    for (std::size_t i = 0; i < levels.size(); ++i)
        if (levels[i] == token) return i;
    return levels.size();
}

Encoder Encoder::fit(const RawDataset& raw, EncodingStrategy strategy, std::size_t max_levels) {
    Encoder enc;
    enc.strategy_ = strategy;
    std::size_t out_col = 0;
    for (const auto& col : raw.columns) {
        enc.source_columns_.push_back(col.name);
        if (col.kind == ColumnKind::numeric) {
            enc.feature_names_.push_back(col.name);
            ++out_col;
            continue;
        }
        std::vector<std::string> levels;
        std::unordered_map<std::string, std::size_t> freq;
        for (const auto& t : col.tokens)
            if (freq[t]++ == 0) levels.push_back(t);
        if (strategy == EncodingStrategy::onehot && max_levels > 0 && levels.size() > max_levels) {
            std::vector<std::size_t> order(levels.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return freq[levels[a]] > freq[levels[b]];
            });
            order.resize(max_levels);
            std::sort(order.begin(), order.end());
            std::vector<std::string> kept;
            for (auto i : order) kept.push_back(levels[i]);
            levels = std::move(kept);
        }
        CategoricalEncoding ce;
        ce.column = col.name;
        ce.strategy = strategy;
        ce.levels = std::move(levels);
        ce.first_output = out_col;
        if (strategy == EncodingStrategy::onehot) {
            ce.width = ce.levels.size() + 1;
            for (const auto& l : ce.levels) enc.feature_names_.push_back(col.name + "=" + l);
            enc.feature_names_.push_back(col.name + "=<unknown>");
        } else {
            ce.width = 1;
            enc.feature_names_.push_back(col.name);
        }
        out_col += ce.width;
        enc.encodings_.push_back(std::move(ce));
    }
    return enc;
}

Dataset Encoder::apply(const RawDataset& raw) const {
    if (raw.columns.size() != source_columns_.size())
        throw DataError(DataErrorKind::dimension_mismatch, "table has a different column layout than the encoder");
    const std::size_t n = raw.rows();
    const std::size_t p = feature_names_.size();
    Dataset d;
    d.features = Matrix(n, p, 0.0);
    d.labels = raw.labels;
    d.feature_names = feature_names_;
    d.class_names = raw.class_names;
    d.schema = raw.schema;
    d.encoding_map = encodings_;

    std::size_t out_col = 0;
    std::size_t enc_i = 0;
    for (std::size_t c = 0; c < raw.columns.size(); ++c) {
        const auto& col = raw.columns[c];
        if (col.name != source_columns_[c])
            throw DataError(DataErrorKind::dimension_mismatch, "column '" + col.name + "' does not match encoder");
        if (col.kind == ColumnKind::numeric) {
            for (std::size_t i = 0; i < n; ++i) d.features(i, out_col) = col.numbers[i];
            ++out_col;
            continue;
        }
        const auto& ce = encodings_[enc_i++];
        std::unordered_map<std::string_view, std::size_t> lookup;
        for (std::size_t l = 0; l < ce.levels.size(); ++l) lookup.emplace(ce.levels[l], l);
        for (std::size_t i = 0; i < n; ++i) {
            const auto it = lookup.find(col.tokens[i]);
            const std::size_t b = it == lookup.end() ? ce.levels.size() : it->second;
            if (strategy_ == EncodingStrategy::onehot) d.features(i, out_col + b) = 1.0;
            else d.features(i, out_col) = static_cast<double>(b);
        }
        out_col += ce.width;
    }
    return d;
}

Dataset encode_categoricals(const RawDataset& raw, EncodingStrategy strategy) {
    return Encoder::fit(raw, strategy).apply(raw);
}

Dataset to_dataset(const RawDataset& raw) {
    for (const auto& c : raw.columns)
        if (c.kind != ColumnKind::numeric)
            throw DataError(DataErrorKind::dimension_mismatch, "column '" + c.name + "' is categorical");
    return encode_categoricals(raw, EncodingStrategy::ordinal);
}

Dataset Dataset::select_rows(std::span<const std::size_t> idx) const {
    Dataset out;
    out.features = features.select_rows(idx);
    out.labels.reserve(idx.size());
    for (auto i : idx) out.labels.push_back(labels[i]);
    out.feature_names = feature_names;
    out.class_names = class_names;
    out.schema = schema;
    out.encoding_map = encoding_map;
    return out;
}

Dataset Dataset::select_features(std::span<const std::size_t> idx) const {
    Dataset out;
    out.features = features.select_cols(idx);
    out.labels = labels;
    for (auto j : idx) out.feature_names.push_back(feature_names[j]);
    out.class_names = class_names;
    out.schema = schema;
    out.encoding_map = encoding_map;
    return out;
}

void Dataset::validate() const {
    if (rows() == 0 || cols() == 0) throw DataError(DataErrorKind::empty_dataset, "dataset is empty");
    if (labels.size() != rows())
        throw DataError(DataErrorKind::dimension_mismatch, "label count differs from row count");
    if (feature_names.size() != cols())
        throw DataError(DataErrorKind::dimension_mismatch, "feature name count differs from column count");
    for (auto l : labels)
        if (l >= class_names.size()) throw DataError(DataErrorKind::unknown_label, "label index out of range");
    for (double v : features.data())
        if (!std::isfinite(v)) throw DataError(DataErrorKind::non_finite, "dataset contains a non-finite value");
}

std::size_t test_count(std::size_t n, double test_fraction) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw ConfigError("test fraction must lie in (0, 1)");
    if (n < 2) throw DataError(DataErrorKind::too_few_rows, "need at least 2 rows to split");
    auto t = static_cast<std::size_t>(std::floor(static_cast<double>(n) * test_fraction + 0.5));
    return std::clamp<std::size_t>(t, 1, n - 1);
}

SplitIndices split_indices(std::size_t n, double test_fraction, std::uint64_t seed) {
    const std::size_t t = test_count(n, test_fraction);
    Rng rng(seed);
    const auto perm = rng.permutation(n);
    SplitIndices s;
    s.test.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(t));
    s.train.assign(perm.begin() + static_cast<std::ptrdiff_t>(t), perm.end());
    std::sort(s.test.begin(), s.test.end());
    std::sort(s.train.begin(), s.train.end());
    return s;
}

SplitPair split(const Dataset& d, double test_fraction, std::uint64_t seed) {
    SplitPair sp;
    sp.indices = split_indices(d.rows(), test_fraction, seed);
    sp.train = d.select_rows(sp.indices.train);
    sp.test = d.select_rows(sp.indices.test);
    sp.seed = seed;
    sp.test_fraction = test_fraction;
    return sp;
}

std::vector<std::size_t> class_counts(std::span<const std::size_t> labels, std::size_t n_classes) {
    std::vector<std::size_t> counts(n_classes, 0);
    for (auto l : labels) {
        if (l >= n_classes) throw DataError(DataErrorKind::unknown_label, "label index out of range");
        ++counts[l];
    }
    return counts;
}

std::map<std::string, std::size_t> class_distribution(std::span<const std::size_t> labels,
                                                      std::span<const std::string> class_names) {
    const auto counts = class_counts(labels, class_names.size());
    std::map<std::string, std::size_t> out;
    for (std::size_t c = 0; c < class_names.size(); ++c) out[class_names[c]] = counts[c];
    return out;
}

std::map<std::string, std::size_t> class_distribution(const Dataset& d) {
    return class_distribution(d.labels, d.class_names);
}

std::map<std::string, std::map<std::string, std::size_t>> categorical_counts(const RawDataset& raw) {
    std::map<std::string, std::map<std::string, std::size_t>> out;
    for (const auto& c : raw.columns) {
        if (c.kind != ColumnKind::categorical) continue;
        auto& m = out[c.name];
        for (const auto& t : c.tokens) ++m[t];
    }
    return out;
}

} // namespace cyclonids
