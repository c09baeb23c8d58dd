#include "gcph/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "gcph/errors.hpp"
#include "gcph/rng.hpp"
#include "gcph/util.hpp"

namespace gcph {

std::string to_hex(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

std::vector<double> Dataset::times() const {
    std::vector<double> out(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) out[i] = records[i].time;
    return out;
}

std::vector<char> Dataset::events() const {
    std::vector<char> out(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) out[i] = records[i].event ? 1 : 0;
    return out;
}

Matrix Dataset::covariates() const {
    Matrix X(records.size(), num_features());
    for (std::size_t i = 0; i < records.size(); ++i) {
        for (std::size_t v = 0; v < num_features(); ++v) X(i, v) = records[i].x[v];
    }
    return X;
}

namespace {

void compute_raw_ranges(Dataset& ds) {
    ds.raw_ranges.assign(ds.num_features(), {0.0, 0.0});
    for (std::size_t v = 0; v < ds.num_features(); ++v) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t i = 0; i < ds.n(); ++i) {
            const double r = ds.raw_value(i, v);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        ds.raw_ranges[v] = {lo, hi};
    }
}

double ground_truth_log_risk(const SyntheticConfig& cfg, double x1, double x2) {
    if (cfg.kind == SyntheticKind::linear) return x1 + 2.0 * x2;
    return std::log(cfg.lambda) * std::exp(-(x1 * x1 + x2 * x2) / (2.0 * cfg.r * cfg.r));
}

} // namespace

Dataset generate_synthetic(const SyntheticConfig& cfg) {
    if (cfg.n == 0) throw input_error("synthetic n must be positive");
    if (!(cfg.lambda > 0.0) || !(cfg.r > 0.0) || !(cfg.mean_t0 > 0.0)) {
        throw input_error("synthetic lambda, r, mean_t0 must be positive");
    }
    if (!(cfg.censor_fraction >= 0.0 && cfg.censor_fraction < 1.0)) {
        throw input_error("censor_fraction must lie in [0,1)");
    }

    constexpr std::size_t kFeatures = 2;
    // one stream per purpose so extra draws never shift the others
    Matrix X(cfg.n, kFeatures);
    for (std::size_t v = 0; v < kFeatures; ++v) {
        Rng stream = make_stream(cfg.seed, 100 + v);
        for (std::size_t i = 0; i < cfg.n; ++i) X(i, v) = stream.uniform(-1.0, 1.0);
    }
    Rng t0_stream = make_stream(cfg.seed, 1);

    Dataset ds;
    ds.feature_names = {"x1", "x2"};
    ds.stats.assign(kFeatures, FeatureStats{});
    ds.standardizable.assign(kFeatures, 1);
    ds.records.resize(cfg.n);
    ds.ground_truth.resize(cfg.n);

    std::vector<double> raw_times(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        const double f = ground_truth_log_risk(cfg, X(i, 0), X(i, 1));
        const double t0 = t0_stream.exponential(cfg.mean_t0);
        ds.ground_truth[i] = f;
        raw_times[i] = t0 / std::exp(f);
        ds.records[i].x = {X(i, 0), X(i, 1)};
    }

    // administrative cap at the (1 - censor_fraction) empirical quantile
    std::vector<double> sorted_times = raw_times;
    std::sort(sorted_times.begin(), sorted_times.end());
    const std::size_t k = static_cast<std::size_t>(
        std::ceil((1.0 - cfg.censor_fraction) * static_cast<double>(cfg.n)));
    const double cap = sorted_times[std::min(k, cfg.n) - 1];
    for (std::size_t i = 0; i < cfg.n; ++i) {
        if (raw_times[i] > cap) {
            ds.records[i].time = cap;
            ds.records[i].event = false;
        } else {
            ds.records[i].time = raw_times[i];
            ds.records[i].event = true;
        }
    }
    compute_raw_ranges(ds);
    return ds;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim whitespace and stray CR
        std::size_t b = cell.find_first_not_of(" \t\r");
        std::size_t e = cell.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

double parse_number(const std::string& cell, std::size_t row, const std::string& col) {
    try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw input_error("row " + std::to_string(row) + ", column '" + col +
                          "': cannot parse '" + cell + "' as a number");
    }
}

} // namespace

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open CSV file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw input_error("CSV file '" + path + "' is empty");
    const auto header = split_line(line);

    auto col_index = [&](const std::string& name) -> std::ptrdiff_t {
        const auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : it - header.begin();
    };
    const std::ptrdiff_t time_idx = col_index(schema.time_col);
    const std::ptrdiff_t event_idx = col_index(schema.event_col);
    if (time_idx < 0) throw input_error("missing time column '" + schema.time_col + "'");
    if (event_idx < 0) throw input_error("missing event column '" + schema.event_col + "'");
    for (const auto& c : schema.categorical_cols) {
        if (col_index(c) < 0) throw input_error("missing categorical column '" + c + "'");
    }
    const std::ptrdiff_t truth_idx =
        schema.truth_col.empty() ? -1 : col_index(schema.truth_col);

    std::set<std::string> skip(schema.ignore_cols.begin(), schema.ignore_cols.end());
    skip.insert(schema.time_col);
    skip.insert(schema.event_col);
    if (truth_idx >= 0) skip.insert(schema.truth_col);
    std::set<std::string> categorical(schema.categorical_cols.begin(),
                                      schema.categorical_cols.end());

    struct Column {
        std::string name;
        std::size_t index;
        bool is_categorical;
    };
    std::vector<Column> columns;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (skip.count(header[c])) continue;
        columns.push_back({header[c], c, categorical.count(header[c]) > 0});
    }
    if (columns.empty()) throw input_error("CSV has no feature columns");

    std::vector<std::vector<std::string>> rows;
    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        ++row_no;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        auto cells = split_line(line);
        if (cells.size() != header.size()) {
            throw input_error("row " + std::to_string(row_no) + ": expected " +
                              std::to_string(header.size()) + " cells, got " +
                              std::to_string(cells.size()));
        }
        rows.push_back(std::move(cells));
    }
    if (rows.empty()) throw input_error("CSV file '" + path + "' has no data rows");

    // expand categoricals: sorted levels, first dropped as reference
    std::map<std::string, std::vector<std::string>> levels;
    for (const auto& col : columns) {
        if (!col.is_categorical) continue;
        std::set<std::string> seen;
        for (const auto& r : rows) seen.insert(r[col.index]);
        levels[col.name] = std::vector<std::string>(seen.begin(), seen.end());
    }

    Dataset ds;
    struct OutCol {
        std::string name;
        std::size_t src;
        bool numeric;
        std::string level; // one-hot target level when !numeric
    };
    std::vector<OutCol> out_cols;
    for (const auto& col : columns) {
        if (col.is_categorical) {
            const auto& lv = levels[col.name];
            for (std::size_t l = 1; l < lv.size(); ++l) {
                out_cols.push_back({col.name + "=" + lv[l], col.index, false, lv[l]});
            }
        } else {
            out_cols.push_back({col.name, col.index, true, ""});
        }
    }
    if (out_cols.empty()) {
        throw input_error("no usable feature columns (single-level categoricals only)");
    }
    for (const auto& oc : out_cols) {
        ds.feature_names.push_back(oc.name);
        ds.standardizable.push_back(oc.numeric ? 1 : 0);
    }

    ds.records.resize(rows.size());
    if (truth_idx >= 0) ds.ground_truth.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto& rec = ds.records[i];
        const double t = parse_number(rows[i][time_idx], i + 1, schema.time_col);
        if (!(t > 0.0) || !std::isfinite(t)) {
            throw input_error("row " + std::to_string(i + 1) + ": time must be positive");
        }
        rec.time = t;
        const double ev = parse_number(rows[i][event_idx], i + 1, schema.event_col);
        if (ev != 0.0 && ev != 1.0) {
            throw input_error("row " + std::to_string(i + 1) + ": event must be 0 or 1");
        }
        rec.event = ev == 1.0;
        rec.x.resize(out_cols.size());
        for (std::size_t v = 0; v < out_cols.size(); ++v) {
            const auto& oc = out_cols[v];
            rec.x[v] = oc.numeric ? parse_number(rows[i][oc.src], i + 1, oc.name)
                                  : (rows[i][oc.src] == oc.level ? 1.0 : 0.0);
        }
        if (truth_idx >= 0) {
            ds.ground_truth[i] = parse_number(rows[i][truth_idx], i + 1, schema.truth_col);
        }
    }

    // z-score numeric columns in place
    ds.stats.assign(out_cols.size(), FeatureStats{});
    const double n = static_cast<double>(ds.n());
    for (std::size_t v = 0; v < out_cols.size(); ++v) {
        if (!ds.standardizable[v]) continue;
        double mean = 0.0;
        for (const auto& rec : ds.records) mean += rec.x[v];
        mean /= n;
        double var = 0.0;
        for (const auto& rec : ds.records) var += (rec.x[v] - mean) * (rec.x[v] - mean);
        const double sd = std::sqrt(var / n);
        if (!(sd > 0.0)) {
            throw input_error("column '" + ds.feature_names[v] +
                              "' is constant; cannot standardize");
        }
        ds.stats[v] = {mean, sd};
        for (auto& rec : ds.records) rec.x[v] = (rec.x[v] - mean) / sd;
    }
    compute_raw_ranges(ds);
    return ds;
}

std::string to_csv(const Dataset& ds) {
    std::string out;
    for (const auto& name : ds.feature_names) {
        out += name;
        out += ',';
    }
    out += "time,event";
    if (ds.has_ground_truth()) out += ",truth";
    out += '\n';
    for (std::size_t i = 0; i < ds.n(); ++i) {
        for (std::size_t v = 0; v < ds.num_features(); ++v) {
            out += fmt_double(ds.raw_value(i, v));
            out += ',';
        }
        out += fmt_double(ds.records[i].time);
        out += ',';
        out += ds.records[i].event ? '1' : '0';
        if (ds.has_ground_truth()) {
            out += ',';
            out += fmt_double(ds.ground_truth[i]);
        }
        out += '\n';
    }
    return out;
}

void save_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot open '" + path + "' for writing");
    out << to_csv(ds);
    if (!out) throw input_error("failed writing CSV to '" + path + "'");
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction,
                                  std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw input_error("test_fraction must lie in (0,1)");
    }
    const std::size_t n = ds.n();
    const std::size_t n_test =
        static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
    if (n_test == 0 || n_test >= n) {
        throw input_error("split would leave an empty part");
    }

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    Rng rng = make_stream(seed, 7);
    for (std::size_t i = n; i-- > 1;) {
        const std::size_t j = static_cast<std::size_t>(rng.below(i + 1));
        std::swap(perm[i], perm[j]);
    }

    auto take = [&](std::size_t begin, std::size_t end) {
        Dataset part;
        part.feature_names = ds.feature_names;
        part.standardizable = ds.standardizable;
        part.stats.assign(ds.num_features(), FeatureStats{});
        for (std::size_t p = begin; p < end; ++p) {
            const std::size_t i = perm[p];
            SurvivalRecord rec = ds.records[i];
            for (std::size_t v = 0; v < ds.num_features(); ++v) rec.x[v] = ds.raw_value(i, v);
            part.records.push_back(std::move(rec));
            if (ds.has_ground_truth()) part.ground_truth.push_back(ds.ground_truth[i]);
        }
        return part;
    };
    Dataset train = take(0, n - n_test);
    Dataset test = take(n - n_test, n);

    bool any_event = false;
    for (const auto& rec : train.records) any_event |= rec.event;
    if (!any_event) throw input_error("train split contains no events");

    // train-only standardization applied to both parts
    const double n_train = static_cast<double>(train.n());
    for (std::size_t v = 0; v < ds.num_features(); ++v) {
        if (!ds.standardizable[v]) continue;
        double mean = 0.0;
        for (const auto& rec : train.records) mean += rec.x[v];
        mean /= n_train;
        double var = 0.0;
        for (const auto& rec : train.records) var += (rec.x[v] - mean) * (rec.x[v] - mean);
        const double sd = std::sqrt(var / n_train);
        if (!(sd > 0.0)) {
            throw input_error("column '" + ds.feature_names[v] +
                              "' is constant in the train split; cannot standardize");
        }
        for (auto& rec : train.records) rec.x[v] = (rec.x[v] - mean) / sd;
        for (auto& rec : test.records) rec.x[v] = (rec.x[v] - mean) / sd;
        train.stats[v] = {mean, sd};
        test.stats[v] = {mean, sd};
    }
    compute_raw_ranges(train);
    compute_raw_ranges(test);
    return {std::move(train), std::move(test)};
}

std::string dataset_fingerprint(const Dataset& ds) {
    return to_hex(fnv1a64(to_csv(ds)));
}

} // namespace gcph
