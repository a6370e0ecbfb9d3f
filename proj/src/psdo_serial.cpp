#include "levyop/errors.hpp"
#include "levyop/psdo_apply.hpp"

namespace levyop::serial {

namespace {

cplx phase(long long num, int N, int sign) {
  return std::polar(1.0, sign * 2.0 * kPi * static_cast<double>(num % N) / N);
}

long long dot_index(const TorusGrid& g, std::size_t a, std::size_t b) {
  const auto ia = g.multi_index(a), ib = g.multi_index(b);
  long long s = 0;
  for (int d = 0; d < g.dim(); ++d) s += static_cast<long long>(ia[d]) * ib[d];
  return s;
}

}  // namespace

GridFunction apply_xform(const SymbolField& p, const GridFunction& f) {
  if (!(p.grid == f.grid()) || f.space() != Space::physical)
    throw ParameterError("serial::apply_xform: grid or space mismatch");
  const auto& g = p.grid;
  const GridFunction F = f.to_frequency();
  const std::size_t M = g.size();
  GridFunction u(g, Space::physical);
  for (std::size_t i = 0; i < M; ++i) {
    cplx acc{};
    for (std::size_t k = 0; k < M; ++k) acc += phase(dot_index(g, i, k), g.points(), +1) * p.at(i, k) * F[k];
    u[i] = acc / static_cast<double>(M);
  }
  return u;
}

GridFunction apply_yform(const SymbolField& q, const GridFunction& f) {
  if (!(q.grid == f.grid()) || f.space() != Space::physical)
    throw ParameterError("serial::apply_yform: grid or space mismatch");
  const auto& g = q.grid;
  const std::size_t M = g.size();
  GridFunction G(g, Space::frequency);
  for (std::size_t k = 0; k < M; ++k) {
    cplx acc{};
    for (std::size_t j = 0; j < M; ++j) acc += phase(dot_index(g, j, k), g.points(), -1) * q.at(j, k) * f[j];
    G[k] = acc;
  }
  return G.to_physical();
}

}  // namespace levyop::serial
