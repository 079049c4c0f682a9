#include "bogo/basis.hpp"
#include "bogo/error.hpp"

#include <array>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace bogo {

namespace {

void put_u32(std::ofstream& out, std::uint32_t x) {
  const unsigned char b[4] = {static_cast<unsigned char>(x), static_cast<unsigned char>(x >> 8),
                              static_cast<unsigned char>(x >> 16), static_cast<unsigned char>(x >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(const unsigned char* b) {
  return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 | std::uint32_t(b[3]) << 24;
}

void put_f64(std::ofstream& out, double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(const unsigned char* b) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= std::uint64_t(b[i]) << (8 * i);
  double x;
  std::memcpy(&x, &bits, 8);
  return x;
}

}  // namespace

void write_csv(const Eigen::MatrixXd& a, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::InvalidArgument, "cannot write " + path);
  char buf[32];
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", a(i, j));
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::InvalidArgument, "cannot read " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    require(rows.empty() || row.size() == rows.front().size(), ErrorCode::InvalidArgument, "ragged CSV " + path);
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd a(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) a(i, j) = rows[i][j];
  return a;
}

void write_binary(const OperatorMatrix& a, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::InvalidArgument, "cannot write " + path);
  out.write("BGSP", 4);
  put_u32(out, 1);
  put_u32(out, static_cast<std::uint32_t>(a.dimension()));
  put_u32(out, static_cast<std::uint32_t>(a.basis ? a.basis->kind() : BasisKind::PlaneWaveTorus));
  for (Eigen::Index i = 0; i < a.entries.rows(); ++i)
    for (Eigen::Index j = 0; j < a.entries.cols(); ++j) put_f64(out, a.entries(i, j));
}

BinaryMatrix read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::InvalidArgument, "cannot read " + path);
  std::array<unsigned char, 16> h;
  in.read(reinterpret_cast<char*>(h.data()), 16);
  require(in.gcount() == 16 && std::memcmp(h.data(), "BGSP", 4) == 0, ErrorCode::InvalidArgument,
          path + " is not a BGSP container");
  require(get_u32(h.data() + 4) == 1, ErrorCode::InvalidArgument, "unsupported BGSP version");
  const std::uint32_t n = get_u32(h.data() + 8), kind = get_u32(h.data() + 12);
  require(kind >= 1 && kind <= 3, ErrorCode::InvalidArgument, "unknown basis kind tag");
  std::vector<unsigned char> body(std::size_t(n) * n * 8);
  in.read(reinterpret_cast<char*>(body.data()), static_cast<std::streamsize>(body.size()));
  require(static_cast<std::size_t>(in.gcount()) == body.size(), ErrorCode::InvalidArgument, "truncated BGSP body");
  BinaryMatrix m{static_cast<BasisKind>(kind), Eigen::MatrixXd(n, n)};
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < n; ++j) m.entries(i, j) = get_f64(body.data() + 8 * (std::size_t(i) * n + j));
  return m;
}

}  // namespace bogo
