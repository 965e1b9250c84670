#include "bae/field_io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <vector>

namespace bae {

namespace {

void append_number(std::string &out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  out += buf;
}

std::ofstream open_out(const std::filesystem::path &path, std::ios::openmode mode = {}) {
  std::ofstream out(path, std::ios::out | std::ios::trunc | mode);
  if (!out)
    throw Error("cannot open " + path.string() + " for writing");
  return out;
}

} // namespace

std::string field_to_csv(const GridField &field) {
  const Grid &g = field.grid();
  std::string out;
  out.reserve(g.size() * 24);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (i > 0)
        out += ',';
      append_number(out, field(i, j));
    }
    out += '\n';
  }
  return out;
}

void write_text(const std::filesystem::path &path, const std::string &text) {
  auto out = open_out(path, std::ios::binary);
  out << text;
  if (!out)
    throw Error("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_field_csv(const std::filesystem::path &path, const GridField &field) {
  write_text(path, field_to_csv(field));
}

GridField read_field_csv(const std::filesystem::path &path, double hx, double hy) {
  std::istringstream in(read_text(path));
  std::vector<double> values;
  int rows = 0;
  int cols = -1;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    std::istringstream ls(line);
    std::string cell;
    int count = 0;
    while (std::getline(ls, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception &) {
        used = 0;
      }
      if (used == 0)
        throw InvalidArgument(path.string() + ": row " + std::to_string(rows + 1) +
                              ": not a number: '" + cell + "'");
      values.push_back(v);
      ++count;
    }
    if (cols >= 0 && count != cols)
      throw InvalidArgument(path.string() + ": ragged row " + std::to_string(rows + 1));
    cols = count;
    ++rows;
  }
  if (rows == 0)
    throw InvalidArgument(path.string() + ": empty field");
  Grid grid(cols, rows, hx, hy);
  return GridField(grid, Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size())));
}

RasterScale write_field_pgm(const std::filesystem::path &path, const GridField &field) {
  const Grid &g = field.grid();
  RasterScale scale{field.values().minCoeff(), field.values().maxCoeff()};
  const double span = scale.max - scale.min;
  std::string bytes = "P5\n" + std::to_string(g.nx()) + " " + std::to_string(g.ny()) + "\n255\n";
  // Image row 0 is the top, so grid rows are written from high j to low j.
  for (int j = g.ny() - 1; j >= 0; --j) {
    for (int i = 0; i < g.nx(); ++i) {
      const double t = span > 0.0 ? (field(i, j) - scale.min) / span : 0.0;
      bytes += static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t)));
    }
  }
  write_text(path, bytes);

  std::string side = "format pgm8\nmin ";
  append_number(side, scale.min);
  side += "\nmax ";
  append_number(side, scale.max);
  side += "\nmapping byte = round(255 * (value - min) / (max - min))\n";
  write_text(path.string() + ".scale.txt", side);
  return scale;
}

void write_summary_csv(const std::filesystem::path &path, const GridField &map,
                       const GridField *pointwise_std) {
  const Grid &g = map.grid();
  if (pointwise_std)
    require_same_grid(g, pointwise_std->grid(), "summary csv");
  std::string out = "index,i,j,map,std\n";
  for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(g.size()); ++k) {
    out += std::to_string(k) + "," + std::to_string(g.col_of(k)) + "," +
           std::to_string(g.row_of(k)) + ",";
    append_number(out, map.values()[k]);
    out += ',';
    if (pointwise_std)
      append_number(out, pointwise_std->values()[k]);
    out += '\n';
  }
  write_text(path, out);
}

void write_cross_section_csv(const std::filesystem::path &path, const GridField &truth,
                             const GridField &map, const CredibleBand *band, int row) {
  const auto t = cross_section(truth, row);
  const auto m = cross_section(map, row);
  std::vector<double> lo, hi;
  if (band) {
    lo = cross_section(band->lower, row);
    hi = cross_section(band->upper, row);
  }
  std::string out = "i,truth,map,lower,upper\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    out += std::to_string(i) + ",";
    append_number(out, t[i]);
    out += ',';
    append_number(out, m[i]);
    out += ',';
    if (band)
      append_number(out, lo[i]);
    out += ',';
    if (band)
      append_number(out, hi[i]);
    out += '\n';
  }
  write_text(path, out);
}

void write_coordinate(const std::filesystem::path &path, const SparseMatrix &matrix) {
  std::string out;
  for (int c = 0; c < matrix.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(matrix, c); it; ++it) {
      out += std::to_string(it.row()) + " " + std::to_string(it.col()) + " ";
      append_number(out, it.value());
      out += '\n';
    }
  }
  write_text(path, out);
}

void write_coordinate(const std::filesystem::path &path, const Matrix &matrix) {
  std::string out;
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      if (matrix(r, c) == 0.0)
        continue;
      out += std::to_string(r) + " " + std::to_string(c) + " ";
      append_number(out, matrix(r, c));
      out += '\n';
    }
  }
  write_text(path, out);
}

std::string file_sha256(const std::filesystem::path &path) {
  const std::string bytes = read_text(path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
    throw Error("sha256 failed for " + path.string());
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i)
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return hex.str();
}

} // namespace bae
