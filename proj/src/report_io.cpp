#include "madlab/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "madlab/errors.hpp"
#include "madlab/simharness.hpp"

namespace madlab {

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void schema_line(std::ostream& out, const char* kind) {
    out << "# madlab-" << kind << " v" << kCsvSchemaVersion << '\n';
}

std::size_t arms_of(std::span<const SimulationBlock> blocks) {
    for (const auto& b : blocks) {
        if (!b.configs.empty()) {
            return b.configs.front().arms;
        }
    }
    return 0;
}

void dgp_cells(std::ostream& out, const DgpSpec& dgp) {
    out << to_string(dgp.kind) << ',' << format_double(dgp.gamma) << ',' << dgp.n_irrelevant;
}

}  // namespace

void write_metrics_csv(std::ostream& out, std::span<const SimulationBlock> blocks) {
    const std::size_t k = arms_of(blocks);
    schema_line(out, "metrics");
    out << "dgp,gamma,n_irrelevant,config,replication,seed,stop_t,steps";
    for (std::size_t a = 1; a < k; ++a) {
        for (const char* f : {"center", "lower", "upper", "width", "target", "miss", "type2", "first_sig"}) {
            out << ',' << f << '_' << a;
        }
    }
    for (std::size_t a = 0; a < k; ++a) {
        out << ",count_" << a << ",share_" << a;
    }
    out << '\n';
    for (const auto& b : blocks) {
        for (const auto& r : b.reports) {
            dgp_cells(out, b.dgp);
            out << ',' << r.config_name << ',' << r.replication << ',' << r.seed << ',' << r.stop_t << ','
                << r.steps;
            for (std::size_t a = 0; a + 1 < k; ++a) {
                out << ',' << format_double(r.final_center[a]) << ',' << format_double(r.final_lower[a])
                    << ',' << format_double(r.final_upper[a]) << ',' << format_double(r.final_width[a])
                    << ',' << format_double(r.target_ate[a]) << ',' << (r.coverage_miss[a] ? 1 : 0)
                    << ',' << (r.type2[a] ? 1 : 0) << ',' << r.first_significant[a];
            }
            for (std::size_t a = 0; a < k; ++a) {
                out << ',' << r.sample_count[a] << ',' << format_double(r.sample_share[a]);
            }
            out << '\n';
        }
    }
}

void write_summary_csv(std::ostream& out, std::span<const SimulationBlock> blocks) {
    schema_line(out, "summary");
    out << "dgp,gamma,n_irrelevant,config,arm,reps,coverage_error,coverage_lower,coverage_upper,"
           "type2,type2_lower,type2_upper,width_mean,width_se,sample_count_mean,sample_count_se,"
           "sample_share_mean,sample_share_se,stop_t_mean\n";
    for (const auto& b : blocks) {
        for (const auto& s : aggregate(b.reports, b.configs)) {
            dgp_cells(out, b.dgp);
            out << ',' << s.config << ',' << s.arm << ',' << s.reps << ','
                << format_double(s.coverage_error.rate) << ',' << format_double(s.coverage_error.lower)
                << ',' << format_double(s.coverage_error.upper) << ',' << format_double(s.type2.rate)
                << ',' << format_double(s.type2.lower) << ',' << format_double(s.type2.upper) << ','
                << format_double(s.width.mean) << ',' << format_double(s.width.se) << ','
                << format_double(s.sample_count.mean) << ',' << format_double(s.sample_count.se) << ','
                << format_double(s.sample_share.mean) << ',' << format_double(s.sample_share.se) << ','
                << format_double(s.stop_t.mean) << '\n';
        }
    }
}

void write_paired_csv(std::ostream& out, std::span<const SimulationBlock> blocks) {
    schema_line(out, "paired");
    out << "dgp,gamma,n_irrelevant,baseline,candidate,replication,arm,width_ratio\n";
    for (const auto& b : blocks) {
        const std::size_t nc = b.configs.size();
        for (std::size_t c = 1; c < nc; ++c) {
            const auto ratios = paired_width_ratios(b.reports, nc, 0, c);
            for (std::size_t r = 0; r < ratios.size(); ++r) {
                for (std::size_t a = 0; a < ratios[r].size(); ++a) {
                    dgp_cells(out, b.dgp);
                    out << ',' << b.configs[0].name << ',' << b.configs[c].name << ',' << r << ','
                        << (a + 1) << ',' << format_double(ratios[r][a]) << '\n';
                }
            }
        }
    }
}

void write_trajectories_csv(std::ostream& out, std::span<const TrajectoryBlock> blocks) {
    std::size_t k = 0;
    for (const auto& b : blocks) {
        if (!b.rows.empty()) {
            k = b.rows.front().p_mad.size();
            break;
        }
    }
    schema_line(out, "trajectories");
    out << "dgp,config,replication,t,step,arm,y";
    for (std::size_t a = 0; a < k; ++a) {
        out << ",p_" << a;
    }
    for (std::size_t a = 0; a < k; ++a) {
        out << ",weight_" << a;
    }
    for (std::size_t a = 1; a < k; ++a) {
        out << ",center_" << a << ",lower_" << a << ",upper_" << a << ",s_hat_" << a;
    }
    out << '\n';
    for (const auto& b : blocks) {
        for (const auto& row : b.rows) {
            out << b.dgp << ',' << b.config << ',' << b.replication << ',' << row.t << ',' << row.step
                << ',' << row.arm << ',' << format_double(row.y);
            for (double p : row.p_mad) {
                out << ',' << format_double(p);
            }
            for (double w : row.weights) {
                out << ',' << format_double(w);
            }
            for (std::size_t a = 0; a < row.cs.size(); ++a) {
                out << ',' << format_double(row.cs[a].center) << ',' << format_double(row.cs[a].lower)
                    << ',' << format_double(row.cs[a].upper) << ',' << format_double(row.s_hat[a]);
            }
            out << '\n';
        }
    }
}

void write_comparison_csv(std::ostream& out, const RctDataset& data,
                          std::span<const SimulationReport> reports) {
    schema_line(out, "comparison");
    out << "config,replication,arm,label,benchmark_ate,center,lower,upper,width,covers_benchmark,n_rows\n";
    for (const auto& r : reports) {
        for (std::size_t a = 1; a < data.arms(); ++a) {
            const double bench = data.benchmark_ate[a - 1];
            const bool covers = r.final_lower[a - 1] <= bench && bench <= r.final_upper[a - 1];
            out << r.config_name << ',' << r.replication << ',' << a << ',' << data.arm_labels[a] << ','
                << format_double(bench) << ',' << format_double(r.final_center[a - 1]) << ','
                << format_double(r.final_lower[a - 1]) << ',' << format_double(r.final_upper[a - 1])
                << ',' << format_double(r.final_width[a - 1]) << ',' << (covers ? 1 : 0) << ','
                << data.count(a) << '\n';
        }
    }
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write '" + path + "'");
    }
    out << content;
    out.close();
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

bool CsvTable::has(const std::string& name) const {
    for (const auto& h : header) {
        if (h == name) {
            return true;
        }
    }
    return false;
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return i;
        }
    }
    throw InputError("unknown column '" + name + "'");
}

void CsvTable::require(const std::vector<std::string>& columns) const {
    std::string missing;
    for (const auto& c : columns) {
        if (!has(c)) {
            missing += (missing.empty() ? "'" : ", '") + c + "'";
        }
    }
    if (!missing.empty()) {
        throw InputError("input is missing required column(s) " + missing);
    }
}

double CsvTable::number(std::size_t row, std::size_t col) const {
    const std::string& cell = rows.at(row).at(col);
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || *end != '\0') {
        throw ParseError("row " + std::to_string(row + 1) + ": column '" + header.at(col) +
                         "' has non-numeric value '" + cell + "'");
    }
    return v;
}

CsvTable read_csv_table(std::istream& in) {
    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line[0] == '#') {
            continue;
        }
        auto fields = split_csv_line(line, ',');
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw ParseError("row " + std::to_string(table.rows.size() + 1) + ": expected " +
                             std::to_string(table.header.size()) + " fields");
        }
        table.rows.push_back(std::move(fields));
    }
    if (!have_header) {
        throw ParseError("CSV input has no header row");
    }
    return table;
}

CsvTable read_csv_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    return read_csv_table(in);
}

}  // namespace madlab
