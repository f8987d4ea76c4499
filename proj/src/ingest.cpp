#include "madlab/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "madlab/errors.hpp"
#include "madlab/sampling.hpp"

namespace madlab {

nlohmann::json to_json(const CsvSchema& schema) {
    return nlohmann::json{{"arm_column", schema.arm_column},
                          {"outcome_column", schema.outcome_column},
                          {"covariate_columns", schema.covariate_columns},
                          {"control_label", schema.control_label},
                          {"delimiter", std::string(1, schema.delimiter)}};
}

CsvSchema schema_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ConfigError("schema must be a JSON object");
    }
    CsvSchema s;
    try {
        s.arm_column = j.value("arm_column", s.arm_column);
        s.outcome_column = j.value("outcome_column", s.outcome_column);
        s.covariate_columns = j.value("covariate_columns", s.covariate_columns);
        s.control_label = j.value("control_label", s.control_label);
        const std::string delim = j.value("delimiter", std::string(1, s.delimiter));
        if (delim.size() != 1) {
            throw ConfigError("schema.delimiter must be a single character");
        }
        s.delimiter = delim[0];
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid schema: ") + e.what());
    }
    if (s.arm_column.empty() || s.outcome_column.empty()) {
        throw ConfigError("schema must name the arm and outcome columns");
    }
    return s;
}

std::vector<std::string> split_csv_line(const std::string& line, char delimiter) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delimiter) {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) {
        return "";
    }
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

double parse_cell(const std::string& raw, const std::string& column, std::size_t row) {
    const std::string cell = trim(raw);
    double value = 0.0;
    const char* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
    if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw ParseError("row " + std::to_string(row) + ": column '" + column +
                         "' has non-numeric value '" + cell + "'");
    }
    return value;
}

std::size_t find_column(const std::vector<std::string>& header, const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw ParseError("schema error: column '" + name + "' not found in header");
    }
    return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

RctDataset make_dataset(std::vector<std::string> arm_labels, std::vector<std::string> covariate_names,
                        std::vector<RctRow> rows) {
    const std::size_t k = arm_labels.size();
    if (k < 2) {
        throw InputError("dataset needs at least two arms");
    }
    RctDataset data;
    data.arm_labels = std::move(arm_labels);
    data.covariate_names = std::move(covariate_names);
    data.rows = std::move(rows);
    for (std::size_t a = 0; a < k; ++a) {
        if (!data.arm_index_map.emplace(data.arm_labels[a], a).second) {
            throw InputError("duplicate arm label '" + data.arm_labels[a] + "'");
        }
    }
    data.rows_by_arm.assign(k, {});
    std::vector<double> sums(k, 0.0);
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
        const RctRow& r = data.rows[i];
        if (r.arm >= k) {
            throw InputError("row " + std::to_string(i + 1) + " has arm index out of range");
        }
        if (!std::isfinite(r.outcome)) {
            throw InputError("row " + std::to_string(i + 1) + " has a non-finite outcome");
        }
        if (r.covariates.size() != data.covariate_names.size()) {
            throw InputError("row " + std::to_string(i + 1) + " has the wrong number of covariates");
        }
        data.rows_by_arm[r.arm].push_back(i);
        sums[r.arm] += r.outcome;
    }
    data.arm_means.resize(k);
    for (std::size_t a = 0; a < k; ++a) {
        if (data.rows_by_arm[a].empty()) {
            throw InputError("arm '" + data.arm_labels[a] + "' has no rows");
        }
        data.arm_means[a] = sums[a] / static_cast<double>(data.rows_by_arm[a].size());
    }
    data.benchmark_ate.resize(k - 1);
    for (std::size_t a = 1; a < k; ++a) {
        data.benchmark_ate[a - 1] = data.arm_means[a] - data.arm_means[0];
    }
    return data;
}

RctDataset parse_csv(std::istream& in, const CsvSchema& schema) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("CSV input is empty; a header row is required");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) {
        line.erase(0, 3);
    }
    std::vector<std::string> header = split_csv_line(line, schema.delimiter);
    for (auto& h : header) {
        h = trim(h);
    }
    const std::size_t arm_col = find_column(header, schema.arm_column);
    const std::size_t out_col = find_column(header, schema.outcome_column);
    std::vector<std::size_t> cov_cols;
    for (const auto& name : schema.covariate_columns) {
        cov_cols.push_back(find_column(header, name));
    }

    std::vector<std::string> labels{schema.control_label};
    std::map<std::string, std::size_t> index{{schema.control_label, 0}};
    std::vector<RctRow> rows;
    std::size_t row_number = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (trim(line).empty()) {
            continue;
        }
        ++row_number;
        const auto fields = split_csv_line(line, schema.delimiter);
        if (fields.size() != header.size()) {
            throw ParseError("row " + std::to_string(row_number) + ": expected " +
                             std::to_string(header.size()) + " fields, found " +
                             std::to_string(fields.size()));
        }
        const std::string label = trim(fields[arm_col]);
        if (label.empty()) {
            throw ParseError("row " + std::to_string(row_number) + ": empty arm label");
        }
        auto [it, inserted] = index.emplace(label, labels.size());
        if (inserted) {
            labels.push_back(label);
        }
        RctRow row;
        row.arm = it->second;
        row.outcome = parse_cell(fields[out_col], schema.outcome_column, row_number);
        row.covariates.reserve(cov_cols.size());
        for (std::size_t c = 0; c < cov_cols.size(); ++c) {
            row.covariates.push_back(
                parse_cell(fields[cov_cols[c]], schema.covariate_columns[c], row_number));
        }
        rows.push_back(std::move(row));
    }
    return make_dataset(std::move(labels), schema.covariate_columns, std::move(rows));
}

RctDataset load_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    return parse_csv(in, schema);
}

Revealed ReplaySource::reveal(std::size_t arm, Rng& rng) {
    const auto& pool = data_.rows_by_arm.at(arm);
    const auto pick = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(pool.size()));
    const RctRow& row = data_.rows[pool[std::min(pick, pool.size() - 1)]];
    return Revealed{row.covariates, row.outcome};
}

RunResult replay(const RctDataset& data, const ExperimentConfig& config, std::uint64_t master_seed,
                 std::uint64_t replication, const EngineOptions& options) {
    if (config.arms != data.arms()) {
        throw ConfigError("experiment '" + config.name + "' has " + std::to_string(config.arms) +
                          " arms but the dataset has " + std::to_string(data.arms()));
    }
    ReplaySource source(data);
    return run_engine(config, source, master_seed, replication, options);
}

namespace {

std::vector<double> default_effects(std::size_t treatments) {
    std::vector<double> effects(treatments);
    for (std::size_t i = 0; i < treatments; ++i) {
        effects[i] = treatments == 1
                         ? 6.0
                         : -6.0 + 12.0 * static_cast<double>(i) / static_cast<double>(treatments - 1);
    }
    return effects;
}

std::string arm_label(std::size_t arm) {
    if (arm == 0) {
        return "control";
    }
    const std::string digits = std::to_string(arm);
    return "T" + std::string(digits.size() < 2 ? 2 - digits.size() : 0, '0') + digits;
}

}  // namespace

CsvSchema synth_schema(const SynthSpec& spec) {
    CsvSchema s;
    s.arm_column = "arm";
    s.outcome_column = "outcome";
    for (std::size_t c = 0; c < spec.covariates; ++c) {
        s.covariate_columns.push_back("x" + std::to_string(c + 1));
    }
    return s;
}

void synth_megastudy(const SynthSpec& spec, std::ostream& out) {
    if (spec.arms < 2 || spec.rows < spec.arms) {
        throw ConfigError("synth needs at least two arms and one row per arm");
    }
    const std::size_t treatments = spec.arms - 1;
    const std::vector<double> effects = spec.effects.empty() ? default_effects(treatments) : spec.effects;
    if (effects.size() != treatments) {
        throw ConfigError("synth effects must list one value per treatment arm");
    }
    std::vector<double> coefs = spec.covariate_coefs;
    coefs.resize(spec.covariates, 0.0);

    Rng rng = make_stream(spec.seed, 0, Stream::units);
    StandardNormal normal;
    const double total_weight = spec.control_weight + static_cast<double>(treatments);

    out << "arm,outcome";
    for (std::size_t c = 0; c < spec.covariates; ++c) {
        out << ",x" << (c + 1);
    }
    out << '\n';
    std::vector<double> x(spec.covariates);
    char buf[64];
    for (std::size_t i = 0; i < spec.rows; ++i) {
        std::size_t arm = 0;
        if (i < spec.arms) {
            arm = i;  // every arm gets at least one row
        } else {
            const double u = uniform01(rng) * total_weight;
            arm = u < spec.control_weight
                      ? 0
                      : std::min(treatments, 1 + static_cast<std::size_t>(u - spec.control_weight));
        }
        double mean = spec.base + (arm == 0 ? 0.0 : effects[arm - 1]);
        for (std::size_t c = 0; c < spec.covariates; ++c) {
            x[c] = normal(rng);
            mean += coefs[c] * x[c];
        }
        const double y = std::clamp(std::round(mean + spec.noise_sd * normal(rng)), 1.0, 100.0);
        out << arm_label(arm);
        std::snprintf(buf, sizeof buf, ",%.0f", y);
        out << buf;
        for (double v : x) {
            std::snprintf(buf, sizeof buf, ",%.6f", v);
            out << buf;
        }
        out << '\n';
    }
}

void synth_megastudy(const SynthSpec& spec, const std::string& path) {
    std::ostringstream buffer;
    synth_megastudy(spec, buffer);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write '" + path + "'");
    }
    out << buffer.str();
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

}  // namespace madlab
