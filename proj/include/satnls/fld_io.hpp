#pragma once

#include "satnls/grid.hpp"

#include <filesystem>
#include <iosfwd>

namespace satnls {

/// FLD1 snapshot layout:
///
///   FLD1 <nx> <ny> <a> <b> <c> <d> <time>\n
///   nx*ny pairs of little-endian float64 (re, im), row-major: node (j, k)
///   is pair number j*ny + k.
///
/// nx = J+1 and ny = K+1 count boundary nodes. The header is plain ASCII
/// with numbers printed at round-trip precision.
struct Snapshot {
  ComplexField field;
  double time = 0.0;
};

void write_fld(std::ostream& os, const ComplexField& u, double time);
void write_fld(const std::filesystem::path& path, const ComplexField& u, double time);

/// The returned grid carries the stored spatial nodes; its time partition is
/// a placeholder (T = 1, N = 2) since FLD1 does not record one.
Snapshot read_fld(std::istream& is);
Snapshot read_fld(const std::filesystem::path& path);

/// Writes a file through a temporary sibling and renames it into place.
template <typename Writer>
void write_atomically(const std::filesystem::path& path, Writer&& writer);

}  // namespace satnls

#include <fstream>
#include <stdexcept>

namespace satnls {

template <typename Writer>
void write_atomically(const std::filesystem::path& path, Writer&& writer) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    writer(os);
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace satnls
