#pragma once

#include "bae/grid.hpp"
#include "bae/inference.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace bae {

/// One line per grid row, values comma-separated in increasing x, '\n'
/// terminated. Values are written with 17 significant digits.
std::string field_to_csv(const GridField &field);
void write_field_csv(const std::filesystem::path &path, const GridField &field);
/// Reads a field written by write_field_csv; the grid has unit spacing
/// unless hx/hy are given.
GridField read_field_csv(const std::filesystem::path &path, double hx = 1.0, double hy = 1.0);

/// Affine min-max scaling used for raster output: byte = round(255 (v - min) / (max - min)).
struct RasterScale {
  double min = 0.0;
  double max = 0.0;
};

/// 8-bit binary PGM plus a sidecar "<path>.scale.txt" with the scaling.
/// Returns the scaling used.
RasterScale write_field_pgm(const std::filesystem::path &path, const GridField &field);

/// Node table: index,i,j,map,std (std left empty when absent).
void write_summary_csv(const std::filesystem::path &path, const GridField &map,
                       const GridField *pointwise_std);

/// Cross-section table: i,truth,map,lower,upper at one grid row.
void write_cross_section_csv(const std::filesystem::path &path, const GridField &truth,
                             const GridField &map, const CredibleBand *band, int row);

/// Coordinate text format, one "row col value" triple per stored entry.
void write_coordinate(const std::filesystem::path &path, const SparseMatrix &matrix);
void write_coordinate(const std::filesystem::path &path, const Matrix &matrix);

/// Hex SHA-256 of a file's bytes.
std::string file_sha256(const std::filesystem::path &path);

void write_text(const std::filesystem::path &path, const std::string &text);
std::string read_text(const std::filesystem::path &path);

} // namespace bae
