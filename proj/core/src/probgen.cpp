#include "schurlr/probgen.hpp"

namespace schurlr {

template <Scalar T>
CsrMatrix<T> laplacian_7pt(const GridSpec& s) {
  if (s.nx < 1 || s.ny < 1 || s.nz < 1) throw std::invalid_argument("laplacian_7pt: dimensions must be >= 1");
  const Index n = s.nx * s.ny * s.nz;
  std::vector<Index> ptr{0}, col;
  std::vector<T> val;
  col.reserve(7 * n);
  val.reserve(7 * n);
  auto id = [&](Index x, Index y, Index z) { return x + s.nx * (y + s.ny * z); };
  for (Index z = 0; z < s.nz; ++z)
    for (Index y = 0; y < s.ny; ++y)
      for (Index x = 0; x < s.nx; ++x) {
        // neighbors emitted in increasing column order
        if (z > 0) col.push_back(id(x, y, z - 1)), val.push_back(T(-1));
        if (y > 0) col.push_back(id(x, y - 1, z)), val.push_back(T(-1));
        if (x > 0) col.push_back(id(x - 1, y, z)), val.push_back(T(-1));
        col.push_back(id(x, y, z)), val.push_back(T(6.0 - s.gamma));
        if (x + 1 < s.nx) col.push_back(id(x + 1, y, z)), val.push_back(T(-1));
        if (y + 1 < s.ny) col.push_back(id(x, y + 1, z)), val.push_back(T(-1));
        if (z + 1 < s.nz) col.push_back(id(x, y, z + 1)), val.push_back(T(-1));
        ptr.push_back(static_cast<Index>(col.size()));
      }
  return CsrMatrix<T>(n, n, std::move(ptr), std::move(col), std::move(val));
}

template CsrMatrix<Real> laplacian_7pt<Real>(const GridSpec&);
template CsrMatrix<Complex> laplacian_7pt<Complex>(const GridSpec&);

CsrMatrix<Real> shifted_laplacian_2d(Index nx, Index ny, Real shift) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("shifted_laplacian_2d: dimensions must be >= 1");
  std::vector<Triplet<Real>> t;
  t.reserve(5 * nx * ny);
  for (Index y = 0; y < ny; ++y)
    for (Index x = 0; x < nx; ++x) {
      const Index i = x + nx * y;
      t.push_back({i, i, 4.0 - shift});
      if (x > 0) t.push_back({i, i - 1, -1.0});
      if (x + 1 < nx) t.push_back({i, i + 1, -1.0});
      if (y > 0) t.push_back({i, i - nx, -1.0});
      if (y + 1 < ny) t.push_back({i, i + nx, -1.0});
    }
  return CsrMatrix<Real>::from_triplets(nx * ny, nx * ny, t);
}

CsrMatrix<Real> uniform_spectrum_diag(Index n, Real lo, Real hi) {
  if (n < 1) throw std::invalid_argument("uniform_spectrum_diag: n must be >= 1");
  if (!(lo < hi)) throw std::invalid_argument("uniform_spectrum_diag: need lo < hi");
  std::vector<Index> ptr(n + 1), col(n);
  std::vector<Real> val(n);
  for (Index i = 0; i < n; ++i) {
    ptr[i + 1] = i + 1;
    col[i] = i;
    val[i] = n == 1 ? lo : lo + (static_cast<Real>(i) / static_cast<Real>(n - 1)) * (hi - lo);
  }
  return CsrMatrix<Real>(n, n, std::move(ptr), std::move(col), std::move(val));
}

}  // namespace schurlr
