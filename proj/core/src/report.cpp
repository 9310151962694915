#include "wavebench/bench.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace wavebench {

namespace {

// 4 significant digits, locale-independent.
std::string fmt4(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4g", x);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

void emit_report_csv(const ReportTable& t, const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw IoError("cannot open report csv: " + p.string());
    out << "configuration,task,method,mean,stddev,runs\n";
    for (const auto& r : t.rows)
        out << r.configuration << ',' << r.task << ',' << r.method << ',' << fmt4(r.mean) << ','
            << fmt4(r.stddev) << ',' << r.runs << '\n';
    if (!out) throw IoError("failed writing report csv: " + p.string());
}

void emit_report_markdown(const ReportTable& t, const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw IoError("cannot open report markdown: " + p.string());
    out << "| Configuration | Task | Method | Steady-state scattered energy | Runs |\n";
    out << "|---|---|---|---|---|\n";
    for (const auto& r : t.rows)
        out << "| " << r.configuration << " | " << r.task << " | " << r.method << " | "
            << fmt4(r.mean) << " ± " << fmt4(r.stddev) << " | " << r.runs << " |\n";
    if (!out) throw IoError("failed writing report markdown: " + p.string());
}

ReportTable parse_report_csv(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw IoError("cannot open report csv: " + p.string());
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty report csv: " + p.string());
    ReportTable t;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 6) throw IoError("malformed report row: " + line);
        ReportRow r;
        r.configuration = f[0];
        r.task = f[1];
        r.method = f[2];
        r.mean = std::stod(f[3]);
        r.stddev = std::stod(f[4]);
        r.runs = std::stoi(f[5]);
        t.rows.push_back(std::move(r));
    }
    return t;
}

}  // namespace wavebench
