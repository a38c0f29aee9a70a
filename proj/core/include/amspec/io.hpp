#pragma once

#include <string>

#include "amspec/admat.hpp"
#include "amspec/frame.hpp"

namespace amspec {

// Signals: CSV with header "re,im" and N^n rows in row-major order, or AMSIG1 binary: a 32-byte header
// {char[8] "AMSIG1\0\0", int64 n, int64 N, float64 T} followed by N^n interleaved re/im float64, little endian.
// CSV carries no grid, so reading it needs the expected grid; AMSIG1 headers must match it. Missing files and
// malformed content throw ParseError, a row count other than N^n throws DimensionMismatch.
SampledSignal read_signal(const std::string& path, const Grid& expected);
void write_signal_csv(const std::string& path, const SampledSignal& f);
void write_signal_binary(const std::string& path, const SampledSignal& f);
// binary when the path ends in ".bin" or ".amsig", CSV otherwise
void write_signal(const std::string& path, const SampledSignal& f);

// Coefficients: CSV "k1,..,kn,l1,..,ln,re,im", one row per stored entry in layout order. Reading places rows on
// `L`; indices outside it throw IndexOutOfTruncation, absent entries read as zero.
void write_coeffs_csv(const std::string& path, const CoeffField& c);
CoeffField read_coeffs_csv(const std::string& path, const LayoutPtr& L);

// Matrices: CSV "j1,..,jn,m1,..,mn,k1,..,kn,n1,..,nn,re,im" over stored entries, row (j,m), column (k,n).
void write_opmatrix_csv(const std::string& path, const OpMatrix& A);

// Little-endian IEEE-754 doubles are assumed for the binary format; other hosts are rejected at compile time.
static_assert(sizeof(double) == 8, "AMSIG1 needs 64-bit doubles");

}  // namespace amspec
