#include "amspec/io.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace amspec {

static_assert(std::endian::native == std::endian::little, "AMSIG1 I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'A', 'M', 'S', 'I', 'G', '1', '\0', '\0'};

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) throw ParseError("cannot open " + path);
    return in;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode);
    if (!out) throw ParseError("cannot write " + path);
    out << std::setprecision(17);
    return out;
}

// Comma-separated numeric fields of one line; ParseError on anything else.
std::vector<double> fields(const std::string& line, const std::string& where) {
    std::vector<double> v;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw ParseError(where + ": not a number '" + tok + "'");
        }
        while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
        if (used != tok.size()) throw ParseError(where + ": trailing characters in '" + tok + "'");
        v.push_back(x);
    }
    return v;
}

bool is_header(const std::string& line) {
    for (char c : line)
        if (std::isalpha(static_cast<unsigned char>(c)) && c != 'e' && c != 'E') return true;
    return line.find("re") != std::string::npos;
}

int as_int(double x, const std::string& where) {
    if (x != std::floor(x) || std::abs(x) > 1e9) throw ParseError(where + ": expected an integer index");
    return int(x);
}

SampledSignal read_binary(std::ifstream& in, const std::string& path, const Grid& expected) {
    char head[32];
    in.read(head, 32);
    if (in.gcount() != 32) throw ParseError(path + ": truncated AMSIG1 header");
    std::int64_t n = 0, N = 0;
    double T = 0.0;
    std::memcpy(&n, head + 8, 8);
    std::memcpy(&N, head + 16, 8);
    std::memcpy(&T, head + 24, 8);
    if (n != expected.dim || N != expected.N || T != expected.T)
        throw DimensionMismatch(path + ": AMSIG1 grid (n=" + std::to_string(n) + ", N=" + std::to_string(N) +
                                ", T=" + std::to_string(T) + ") differs from the configured grid");
    SampledSignal f(expected);
    std::vector<double> raw(2 * f.values.size());
    in.read(reinterpret_cast<char*>(raw.data()), std::streamsize(raw.size() * sizeof(double)));
    if (std::size_t(in.gcount()) != raw.size() * sizeof(double))
        throw DimensionMismatch(path + ": AMSIG1 payload shorter than N^n samples");
    in.peek();
    if (!in.eof()) throw DimensionMismatch(path + ": AMSIG1 payload longer than N^n samples");
    for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = cd(raw[2 * i], raw[2 * i + 1]);
    return f;
}

}  // namespace

SampledSignal read_signal(const std::string& path, const Grid& expected) {
    expected.validate();
    std::ifstream in = open_in(path, std::ios::in | std::ios::binary);
    char magic[8] = {};
    in.read(magic, 8);
    in.clear();
    in.seekg(0);
    if (std::memcmp(magic, kMagic, 8) == 0) return read_binary(in, path, expected);

    std::vector<cd> vals;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (vals.empty() && is_header(line)) {
            if (line != "re,im") throw ParseError(path + ":" + std::to_string(lineno) + ": expected header re,im");
            continue;
        }
        const std::vector<double> v = fields(line, path + ":" + std::to_string(lineno));
        if (v.size() != 2) throw ParseError(path + ":" + std::to_string(lineno) + ": expected two columns re,im");
        vals.emplace_back(v[0], v[1]);
    }
    if (vals.size() != expected.size())
        throw DimensionMismatch(path + ": " + std::to_string(vals.size()) + " rows, grid needs " +
                                std::to_string(expected.size()));
    return SampledSignal(expected, std::move(vals));
}

void write_signal_csv(const std::string& path, const SampledSignal& f) {
    std::ofstream out = open_out(path);
    out << "re,im\n";
    for (const cd& z : f.values) out << z.real() << ',' << z.imag() << '\n';
    if (!out) throw ParseError("write failed on " + path);
}

void write_signal_binary(const std::string& path, const SampledSignal& f) {
    std::ofstream out = open_out(path, std::ios::out | std::ios::binary);
    char head[32] = {};
    std::memcpy(head, kMagic, 8);
    const std::int64_t n = f.grid.dim, N = f.grid.N;
    const double T = f.grid.T;
    std::memcpy(head + 8, &n, 8);
    std::memcpy(head + 16, &N, 8);
    std::memcpy(head + 24, &T, 8);
    out.write(head, 32);
    std::vector<double> raw(2 * f.values.size());
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        raw[2 * i] = f.values[i].real();
        raw[2 * i + 1] = f.values[i].imag();
    }
    out.write(reinterpret_cast<const char*>(raw.data()), std::streamsize(raw.size() * sizeof(double)));
    if (!out) throw ParseError("write failed on " + path);
}

void write_signal(const std::string& path, const SampledSignal& f) {
    auto ends = [&](const std::string& s) {
        return path.size() >= s.size() && path.compare(path.size() - s.size(), s.size(), s) == 0;
    };
    if (ends(".bin") || ends(".amsig"))
        write_signal_binary(path, f);
    else
        write_signal_csv(path, f);
}

void write_coeffs_csv(const std::string& path, const CoeffField& c) {
    const TFLayout& L = *c.layout;
    const int n = L.dim();
    std::ofstream out = open_out(path);
    for (int i = 0; i < n; ++i) out << 'k' << i + 1 << ',';
    for (int i = 0; i < n; ++i) out << 'l' << i + 1 << ',';
    out << "re,im\n";
    for (std::size_t idx = 0; idx < L.size(); ++idx) {
        const IVec& k = L.block(L.block_of_flat(idx)).k;
        const IVec ell = L.ell_of(idx);
        for (int v : k) out << v << ',';
        for (int v : ell) out << v << ',';
        out << c.values[idx].real() << ',' << c.values[idx].imag() << '\n';
    }
    if (!out) throw ParseError("write failed on " + path);
}

CoeffField read_coeffs_csv(const std::string& path, const LayoutPtr& L) {
    const int n = L->dim();
    std::ifstream in = open_in(path);
    CoeffField c(L);
    std::string line;
    std::size_t lineno = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const std::string where = path + ":" + std::to_string(lineno);
        if (first && is_header(line)) {
            first = false;
            continue;
        }
        first = false;
        const std::vector<double> v = fields(line, where);
        if (int(v.size()) != 2 * n + 2)
            throw ParseError(where + ": expected " + std::to_string(2 * n + 2) + " columns");
        IVec k(n), ell(n);
        for (int i = 0; i < n; ++i) {
            k[i] = as_int(v[i], where);
            ell[i] = as_int(v[n + i], where);
        }
        // flat() throws IndexOutOfTruncation for indices off the layout
        c.values[L->flat(k, ell)] = cd(v[2 * n], v[2 * n + 1]);
    }
    return c;
}

void write_opmatrix_csv(const std::string& path, const OpMatrix& A) {
    const TFLayout& R = *A.row_layout();
    const TFLayout& C = *A.col_layout();
    const int n = R.dim();
    std::ofstream out = open_out(path);
    for (const char* name : {"j", "m", "k", "n"})
        for (int i = 0; i < n; ++i) out << name << i + 1 << ',';
    out << "re,im\n";
    const auto& ptr = A.row_ptr();
    const auto& col = A.col_index();
    const auto& val = A.values();
    for (std::size_t r = 0; r < A.num_rows(); ++r) {
        const IVec& j = R.block(R.block_of_flat(r)).k;
        const IVec m = R.ell_of(r);
        for (std::size_t e = ptr[r]; e < ptr[r + 1]; ++e) {
            const IVec& k = C.block(C.block_of_flat(col[e])).k;
            const IVec l = C.ell_of(col[e]);
            for (const IVec* v : {&j, &m, &k, &l})
                for (int x : *v) out << x << ',';
            out << val[e].real() << ',' << val[e].imag() << '\n';
        }
    }
    if (!out) throw ParseError("write failed on " + path);
}

}  // namespace amspec
