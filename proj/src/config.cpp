#include "lognls/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lognls {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_real(const std::string& v, int line) {
    size_t pos = 0;
    double x;
    try {
        x = std::stod(v, &pos);
    } catch (...) {
        throw config_error("not a number: '" + v + "'", line);
    }
    if (pos != v.size()) throw config_error("trailing junk after number: '" + v + "'", line);
    if (!std::isfinite(x)) throw config_error("non-finite value: '" + v + "'", line);
    return x;
}

long parse_int(const std::string& v, int line) {
    size_t pos = 0;
    long x;
    try {
        x = std::stol(v, &pos);
    } catch (...) {
        throw config_error("not an integer: '" + v + "'", line);
    }
    if (pos != v.size()) throw config_error("trailing junk after integer: '" + v + "'", line);
    return x;
}

} // namespace

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    bool seen_problem = false;

    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        const size_t hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw config_error("unterminated section header", line);
            section = trim(s.substr(1, s.size() - 2));
            if (section != "problem" && section != "grid" && section != "solver" &&
                section != "output")
                throw config_error("unknown section [" + section + "]", line);
            continue;
        }
        const size_t eq = s.find('=');
        if (eq == std::string::npos) throw config_error("expected key = value", line);
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (key.empty()) throw config_error("empty key", line);
        if (val.empty()) throw config_error("missing value for '" + key + "'", line);

        if (section.empty()) {
            if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(val, line));
            else throw config_error("unknown top-level key '" + key + "'", line);
        } else if (section == "problem") {
            seen_problem = true;
            if (key == "N") cfg.problem.N = static_cast<int>(parse_int(val, line));
            else if (key == "alpha") cfg.problem.alpha = parse_real(val, line);
            else if (key == "mu") cfg.problem.mu = parse_real(val, line);
            else if (key == "p") cfg.problem.p = parse_real(val, line);
            else if (key == "c") cfg.problem.c = parse_real(val, line);
            else throw config_error("unknown key '" + key + "' in [problem]", line);
        } else if (section == "grid") {
            if (key == "R") cfg.grid.R = parse_real(val, line);
            else if (key == "M") cfg.grid.M = static_cast<int>(parse_int(val, line));
            else throw config_error("unknown key '" + key + "' in [grid]", line);
        } else if (section == "solver") {
            if (key == "tol_grad") cfg.solver.tol_grad = parse_real(val, line);
            else if (key == "tol_P") cfg.solver.tol_P = parse_real(val, line);
            else if (key == "max_iter") cfg.solver.max_iter = parse_int(val, line);
            else if (key == "step0") cfg.solver.step0 = parse_real(val, line);
            else if (key == "backtrack") cfg.solver.backtrack = parse_real(val, line);
            else if (key == "seed") cfg.solver.seed = static_cast<std::uint64_t>(parse_int(val, line));
            else if (key == "guard_margin") cfg.solver.guard_margin = parse_real(val, line);
            else if (key == "guard_cap") cfg.solver.guard_cap = static_cast<int>(parse_int(val, line));
            else if (key == "pcmax_margin") cfg.solver.pcmax_margin = parse_real(val, line);
            else throw config_error("unknown key '" + key + "' in [solver]", line);
        } else { // output
            if (key == "directory") cfg.output.directory = val;
            else if (key == "formats") {
                cfg.output.csv = cfg.output.structured_text = false;
                std::istringstream fs(val);
                std::string tok;
                while (std::getline(fs, tok, ',')) {
                    tok = trim(tok);
                    if (tok == "csv") cfg.output.csv = true;
                    else if (tok == "structured-text") cfg.output.structured_text = true;
                    else throw config_error("unknown format '" + tok + "'", line);
                }
            } else {
                throw config_error("unknown key '" + key + "' in [output]", line);
            }
        }
    }

    if (!seen_problem) throw config_error("missing [problem] section", 0);
    // Physical gates at parse time, with readable messages.
    if (cfg.problem.N < 2) throw config_error("N must be >= 2", 0);
    if (!(cfg.problem.p > 2.0)) throw config_error("p must exceed 2", 0);
    if (cfg.problem.N >= 3 && cfg.problem.p > cfg.problem.p_critical() + 1e-12)
        throw config_error("p exceeds the critical exponent 2N/(N-2)", 0);
    if (!(cfg.problem.c > 0.0)) throw config_error("c must be positive", 0);
    if (!(cfg.grid.R > 0.0)) throw config_error("grid R must be positive", 0);
    if (cfg.grid.M < 64) throw config_error("grid M must be >= 64", 0);
    try {
        cfg.solver.validate();
    } catch (const error& e) {
        throw config_error(e.what(), 0);
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream os;
    os << "seed = " << cfg.seed << "\n";
    os << "[problem]\n";
    os << "N = " << cfg.problem.N << "\n";
    os << "alpha = " << format_double(cfg.problem.alpha) << "\n";
    os << "mu = " << format_double(cfg.problem.mu) << "\n";
    os << "p = " << format_double(cfg.problem.p) << "\n";
    os << "c = " << format_double(cfg.problem.c) << "\n";
    os << "[grid]\n";
    os << "R = " << format_double(cfg.grid.R) << "\n";
    os << "M = " << cfg.grid.M << "\n";
    os << "[solver]\n";
    os << "tol_grad = " << format_double(cfg.solver.tol_grad) << "\n";
    os << "tol_P = " << format_double(cfg.solver.tol_P) << "\n";
    os << "max_iter = " << cfg.solver.max_iter << "\n";
    os << "step0 = " << format_double(cfg.solver.step0) << "\n";
    os << "backtrack = " << format_double(cfg.solver.backtrack) << "\n";
    os << "seed = " << cfg.solver.seed << "\n";
    os << "guard_margin = " << format_double(cfg.solver.guard_margin) << "\n";
    os << "guard_cap = " << cfg.solver.guard_cap << "\n";
    os << "pcmax_margin = " << format_double(cfg.solver.pcmax_margin) << "\n";
    os << "[output]\n";
    os << "directory = " << cfg.output.directory << "\n";
    std::string fmts;
    if (cfg.output.csv) fmts += "csv";
    if (cfg.output.structured_text) fmts += fmts.empty() ? "structured-text" : ",structured-text";
    os << "formats = " << fmts << "\n";
    return os.str();
}

void write_report(const std::string& path, const std::string& kind,
                  const std::vector<std::pair<std::string, std::string>>& entries,
                  const RunConfig& cfg) {
    std::ofstream out(path);
    if (!out) throw error("cannot write report " + path);
    out << "# lognls " << kind << " report\n";
    for (const auto& [k, v] : entries) out << k << " = " << v << "\n";
    out << "[resolved-config]\n";
    std::istringstream cfgs(serialize_config(cfg));
    std::string line;
    while (std::getline(cfgs, line)) out << "config." << line << "\n";
    if (!out) throw error("write failed for " + path);
}

void write_trace_csv(const std::string& path, const std::vector<TracePoint>& trace) {
    std::ofstream out(path);
    if (!out) throw error("cannot write trace " + path);
    out << "iter,I,P\n";
    for (const TracePoint& tp : trace)
        out << tp.iter << "," << format_double(tp.I) << "," << format_double(tp.P) << "\n";
    if (!out) throw error("write failed for " + path);
}

} // namespace lognls
