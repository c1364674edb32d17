#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <queue>
#include <sstream>

#include "gurevic/error.hpp"
#include "gurevic/indexed_ball.hpp"
#include "gurevic/skewprod.hpp"

namespace gurevic {

std::string to_string(MixingStatus status) {
  switch (status) {
    case MixingStatus::verified:
      return "verified";
    case MixingStatus::assumed:
      return "assumed";
    case MixingStatus::failed:
      return "failed";
  }
  return "?";
}

SkewSystem::SkewSystem(ShiftSystem shift, Potential potential, Cocycle cocycle)
    : shift_(std::move(shift)), potential_(std::move(potential)), cocycle_(std::move(cocycle)) {
  cocycle_.validate(shift_.size());
  if (potential_.states() != shift_.size())
    throw ValidationError("potential is defined on " + std::to_string(potential_.states()) +
                          " states, shift has " + std::to_string(shift_.size()));
  f_ = lattice_values(abelianize(cocycle_));
}

SkewSystem SkewSystem::abelianized() const { return SkewSystem(shift_, potential_, abelianize(cocycle_)); }

SkewSystem SkewSystem::with_mixing_check(int horizon, std::size_t budget) const {
  SkewSystem out = *this;
  out.mixing_ = check_extension_mixing(*this, horizon, budget);
  return out;
}

namespace {

using Row = std::vector<std::int64_t>;

// Row-style Hermite normal form of the lattice spanned by `rows`.
std::vector<Row> hermite_basis(std::vector<Row> rows, std::size_t dim) {
  std::vector<Row> basis;
  for (std::size_t col = 0; col < dim && !rows.empty(); ++col) {
    while (true) {
      // smallest nonzero pivot candidate in this column
      std::size_t best = rows.size();
      for (std::size_t r = 0; r < rows.size(); ++r)
        if (rows[r][col] != 0 && (best == rows.size() || std::llabs(rows[r][col]) < std::llabs(rows[best][col])))
          best = r;
      if (best == rows.size()) break;
      bool others = false;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (r == best || rows[r][col] == 0) continue;
        std::int64_t q = rows[r][col] / rows[best][col];
        for (std::size_t c = 0; c < dim; ++c) rows[r][c] -= q * rows[best][c];
        if (rows[r][col] != 0) others = true;
      }
      if (!others) {
        Row pivot = rows[best];
        rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(best));
        if (pivot[col] < 0)
          for (auto& v : pivot) v = -v;
        basis.push_back(std::move(pivot));
        break;
      }
    }
    std::erase_if(rows, [&](const Row& r) { return std::all_of(r.begin(), r.end(), [](auto v) { return v == 0; }); });
  }
  // reduce entries above each pivot
  for (std::size_t k = 0; k < basis.size(); ++k) {
    std::size_t col = 0;
    while (basis[k][col] == 0) ++col;
    for (std::size_t r = 0; r < k; ++r) {
      std::int64_t q = basis[r][col] / basis[k][col];
      if (basis[r][col] - q * basis[k][col] < 0) --q;
      for (std::size_t c = 0; c < dim; ++c) basis[r][c] -= q * basis[k][c];
    }
  }
  return basis;
}

std::string format_rows(const std::vector<Row>& rows) {
  std::ostringstream out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (r) out << ' ';
    out << '(';
    for (std::size_t c = 0; c < rows[r].size(); ++c) out << (c ? "," : "") << rows[r][c];
    out << ')';
  }
  return out.str();
}

}  // namespace

MixingReport check_extension_mixing(const SkewSystem& sys, int horizon, std::size_t budget) {
  const auto& shift = sys.shift();
  if (!shift.mixing()) throw ContractError("extension mixing check needs a mixing base shift");
  const auto& f = sys.displacement();
  const std::size_t dim = static_cast<std::size_t>(sys.rank()) + 1;
  const int s = shift.size();

  // Closed walks generate the same group as the tree-cycle vectors
  // P(i) + (1, f(i)) - P(j) over all edges.
  std::vector<Row> potential(s);
  std::vector<bool> seen(s, false);
  std::queue<int> frontier;
  potential[0] = Row(dim, 0);
  seen[0] = true;
  frontier.push(0);
  auto step = [&](int i) {
    Row e(dim);
    e[0] = 1;
    for (std::size_t c = 1; c < dim; ++c) e[c] = f[i][c - 1];
    return e;
  };
  while (!frontier.empty()) {
    int i = frontier.front();
    frontier.pop();
    for (int j : shift.successors(i)) {
      if (seen[j]) continue;
      seen[j] = true;
      potential[j] = potential[i];
      auto e = step(i);
      for (std::size_t c = 0; c < dim; ++c) potential[j][c] += e[c];
      frontier.push(j);
    }
  }
  std::vector<Row> cycles;
  for (int i = 0; i < s; ++i)
    for (int j : shift.successors(i)) {
      Row v = step(i);
      for (std::size_t c = 0; c < dim; ++c) v[c] += potential[i][c] - potential[j][c];
      cycles.push_back(std::move(v));
    }

  MixingReport report;
  report.method = "lattice";
  report.horizon = horizon;
  report.lattice_basis = hermite_basis(cycles, dim);
  if (report.lattice_basis.size() == dim) {
    report.lattice_index = 1;
    for (std::size_t k = 0; k < dim; ++k) report.lattice_index *= report.lattice_basis[k][k];
  }
  std::ostringstream ev;
  ev << "cycle lattice in Z^" << dim << " spanned by " << format_rows(report.lattice_basis);
  if (report.lattice_index == 0)
    ev << " (rank " << report.lattice_basis.size() << ", infinite index)";
  else
    ev << " (index " << report.lattice_index << ")";

  if (report.lattice_index != 1) {
    report.status = MixingStatus::failed;
    report.evidence = ev.str();
    return report;
  }
  if (sys.group().kind() == GroupKind::lattice) {
    report.status = MixingStatus::verified;
    report.evidence = ev.str();
    return report;
  }

  // Non-abelian (or torsion) part: bounded reachability evidence.
  report.method = "lattice+reachability";
  if (horizon < 2) throw ContractError("reachability horizon must be >= 2");
  const int step_length = std::max(1, sys.cocycle().max_step_length());
  IndexedBall b(sys.group(), horizon * step_length, budget / std::max(1, s));
  if (static_cast<std::size_t>(s) * b.size() > budget)
    throw BudgetError("reachability sets", static_cast<std::size_t>(s) * b.size(), budget);
  std::vector<std::vector<std::int32_t>> times(s);
  for (int i = 0; i < s; ++i) times[i] = b.right_multiplication(sys.cocycle().values[i]);

  const int half = horizon / 2;
  bool all_reached = true;
  std::size_t missing = 0;
  for (int start = 0; start < s && all_reached; ++start) {
    std::vector<std::uint8_t> cur(static_cast<std::size_t>(s) * b.size(), 0), next(cur.size());
    cur[static_cast<std::size_t>(start) * b.size()] = 1;
    for (int lag = 1; lag <= horizon; ++lag) {
      std::fill(next.begin(), next.end(), 0);
      for (int i = 0; i < s; ++i)
        for (std::size_t g = 0; g < b.size(); ++g) {
          if (!cur[i * b.size() + g]) continue;
          auto h = times[i][g];
          if (h < 0) continue;
          for (int j : shift.successors(i)) next[j * b.size() + h] = 1;
        }
      std::swap(cur, next);
      if (lag >= horizon - 1) {
        for (int j = 0; j < s; ++j)
          for (std::size_t g = 0; g < b.size(); ++g)
            if (b.length(g) <= half && !cur[j * b.size() + g]) ++missing;
        if (missing) all_reached = false;
      }
    }
  }
  if (all_reached) {
    report.status = MixingStatus::verified;
    ev << "; every (state, g) with |g| <= " << half << " reached at lags " << horizon - 1 << " and "
       << horizon;
  } else {
    report.status = MixingStatus::assumed;
    ev << "; " << missing << " (state, g) pairs with |g| <= " << half << " not reached by lag "
       << horizon;
  }
  report.evidence = ev.str();
  return report;
}

ConstraintMode ConstraintMode::periodic_all(std::optional<GroupElement> target) {
  ConstraintMode m;
  m.kind = Kind::periodic_all;
  m.target = std::move(target);
  return m;
}

ConstraintMode ConstraintMode::periodic_cylinder(int a, std::optional<GroupElement> target) {
  ConstraintMode m;
  m.kind = Kind::periodic_cylinder;
  m.cylinder = a;
  m.target = std::move(target);
  return m;
}

ConstraintMode ConstraintMode::preimage(BasePoint o, std::optional<GroupElement> target) {
  ConstraintMode m;
  m.kind = Kind::preimage;
  m.base_point = std::move(o);
  m.target = std::move(target);
  return m;
}

ConstraintMode ConstraintMode::preimage_cylinder(int a, BasePoint o, std::optional<GroupElement> target) {
  ConstraintMode m;
  m.kind = Kind::preimage_cylinder;
  m.cylinder = a;
  m.base_point = std::move(o);
  m.target = std::move(target);
  return m;
}

std::string ConstraintMode::name() const {
  switch (kind) {
    case Kind::periodic_all:
      return "periodic";
    case Kind::periodic_cylinder:
      return "periodic_cylinder";
    case Kind::preimage:
      return "preimage";
    case Kind::preimage_cylinder:
      return "preimage_cylinder";
  }
  return "?";
}

void ConstraintMode::validate(const SkewSystem& sys) const {
  const bool wants_cylinder = kind == Kind::periodic_cylinder || kind == Kind::preimage_cylinder;
  if (wants_cylinder) {
    if (!cylinder) throw ContractError(name() + " mode needs a cylinder state");
    if (*cylinder < 0 || *cylinder >= sys.shift().size())
      throw ContractError("cylinder state " + std::to_string(*cylinder + 1) + " out of range");
  }
  if (!periodic()) {
    if (!base_point) throw ContractError(name() + " mode needs a base point");
    base_point->validate(sys.shift());
  }
  if (target && !sys.group().contains(*target))
    throw ContractError("target is not an element of " + sys.group().name());
}

}  // namespace gurevic
