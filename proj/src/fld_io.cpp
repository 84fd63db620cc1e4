#include "satnls/fld_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace satnls {

namespace {

void put_f64_le(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(buf), 8);
}

double get_f64_le(const unsigned char* buf) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

}  // namespace

void write_fld(std::ostream& os, const ComplexField& u, double time) {
  const Grid2D& g = u.grid;
  std::ostringstream header;
  header.precision(17);
  header << "FLD1 " << g.nx() << ' ' << g.ny() << ' ' << g.a << ' ' << g.b << ' ' << g.c << ' '
         << g.d << ' ' << time << '\n';
  os << header.str();
  for (int j = 0; j < g.nx(); ++j)
    for (int k = 0; k < g.ny(); ++k) {
      put_f64_le(os, u.values(j, k).real());
      put_f64_le(os, u.values(j, k).imag());
    }
}

void write_fld(const std::filesystem::path& path, const ComplexField& u, double time) {
  write_atomically(path, [&](std::ostream& os) { write_fld(os, u, time); });
}

Snapshot read_fld(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("FLD1: missing header");
  std::istringstream hs(line);
  std::string magic;
  int nx = 0, ny = 0;
  Box box;
  double time = 0.0;
  hs >> magic >> nx >> ny >> box.a >> box.b >> box.c >> box.d >> time;
  if (!hs || magic != "FLD1") throw std::runtime_error("FLD1: malformed header '" + line + "'");
  Snapshot snap;
  snap.time = time;
  const Grid2D g = build_grid(box, nx - 1, ny - 1, 1.0, 2);
  snap.field = ComplexField(g);
  std::vector<unsigned char> buf(static_cast<std::size_t>(ny) * 16);
  for (int j = 0; j < nx; ++j) {
    is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (is.gcount() != static_cast<std::streamsize>(buf.size()))
      throw std::runtime_error("FLD1: truncated payload");
    for (int k = 0; k < ny; ++k) {
      const unsigned char* p = buf.data() + 16 * k;
      snap.field.values(j, k) = Complex(get_f64_le(p), get_f64_le(p + 8));
    }
  }
  return snap;
}

Snapshot read_fld(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return read_fld(is);
}

}  // namespace satnls
