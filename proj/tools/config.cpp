#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "amspec/lattice.hpp"
#include "cli.hpp"

namespace amspec::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ParseError("config key '" + key + "': not a number '" + v + "'");
    }
    if (used != v.size()) throw ParseError("config key '" + key + "': trailing characters in '" + v + "'");
    return x;
}

long to_long(const std::string& key, const std::string& v) {
    const double x = to_double(key, v);
    if (x != std::floor(x) || std::abs(x) > 9e15) throw ParseError("config key '" + key + "': expected an integer");
    return long(x);
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (key == "dim") dim = int(to_long(key, v));
    else if (key == "alpha") alpha = to_double(key, v);
    else if (key == "s") s = to_double(key, v);
    else if (key == "q") q = to_double(key, v);
    else if (key == "kmax") kmax = int(to_long(key, v));
    else if (key == "grid_n") grid_n = int(to_long(key, v));
    else if (key == "grid_T") grid_T = to_double(key, v);
    else if (key == "c1") c1 = to_double(key, v);
    else if (key == "delta") delta = to_double(key, v);
    else if (key == "seed") {
        const long x = to_long(key, v);
        if (x < 0) throw ParseError("config key 'seed' must be nonnegative");
        seed = std::uint64_t(x);
    } else if (key == "p") {
        p.clear();
        std::stringstream ss(v);
        std::string tok;
        while (std::getline(ss, tok, ',')) p.push_back(to_double(key, trim(tok)));
        if (p.empty()) throw ParseError("config key 'p' is empty");
    } else {
        throw ParseError("unknown config key '" + key + "'");
    }
}

RunConfig RunConfig::parse(const std::string& text) {
    RunConfig c;
    std::stringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
        c.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string RunConfig::to_text() const {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "dim = " << dim << '\n' << "alpha = " << alpha << '\n' << "s = " << s << '\n' << "p = ";
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
    os << '\n'
       << "q = " << q << '\n'
       << "kmax = " << kmax << '\n'
       << "grid_n = " << grid_n << '\n'
       << "grid_T = " << grid_T << '\n'
       << "c1 = " << c1 << '\n'
       << "delta = " << delta << '\n'
       << "seed = " << seed << '\n';
    return os.str();
}

PVec RunConfig::pvec() const {
    RVec pv = p;
    if (pv.size() == 1 && dim > 1) pv.assign(std::size_t(dim), p[0]);
    return PVec(pv, q);
}

void RunConfig::validate() const {
    require(dim >= 1 && dim <= 3, "dim must be 1, 2 or 3");
    if (!(p.size() == 1 || int(p.size()) == dim))
        throw DimensionMismatch("p has " + std::to_string(p.size()) + " entries for dim " + std::to_string(dim));
    for (double x : p) require(x > 0.0 && std::isfinite(x), "p entries must be positive and finite");
    require(q > 0.0 && std::isfinite(q), "q must be positive and finite");
    require(kmax >= 0, "kmax must be nonnegative");
    require(delta > 0.0, "delta must be positive");
    require(c1 == 0.0 || c1 > 0.0, "c1 must be positive (0 selects it)");
    grid().validate();
    AlphaGeometry::make(alpha, dim, c1 > 0.0 ? c1 : 1.0).validate();
}

bool RunConfig::operator==(const RunConfig& o) const {
    return dim == o.dim && alpha == o.alpha && s == o.s && p == o.p && q == o.q && kmax == o.kmax &&
           grid_n == o.grid_n && grid_T == o.grid_T && c1 == o.c1 && delta == o.delta && seed == o.seed;
}

std::string config_hash(const RunConfig& c) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : c.to_text()) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

}  // namespace amspec::cli
