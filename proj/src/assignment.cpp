#include "ilm/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ilm/errors.hpp"
#include "ilm/pose_estimation.hpp"

namespace ilm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

CostMatrix CostMatrix::padded_square() const {
  if (is_square()) return *this;
  CostMatrix out = *this;
  const int n = cols();
  out.entries = Eigen::MatrixXd::Zero(n, n);
  out.entries.topRows(rows()) = entries;
  out.padding_rows = n - rows();
  out.row_ids.resize(n, -1);
  return out;
}

CostMatrix build_cost_matrix(std::span<const Eigen::Vector2d> guess_world_pts,
                             std::span<const Landmark> candidates) {
  if (guess_world_pts.empty()) throw std::invalid_argument("cost matrix: no observations");
  if (candidates.empty()) throw std::invalid_argument("cost matrix: no candidate landmarks");

  const int m = static_cast<int>(guess_world_pts.size());
  const int k = static_cast<int>(candidates.size());
  const int n = std::max(m, k);  // pad columns when observations outnumber candidates

  CostMatrix c;
  c.entries = Eigen::MatrixXd::Zero(m, n);
  c.row_ids.resize(m);
  c.col_ids.assign(n, -1);
  c.padding_cols = n - k;
  for (int i = 0; i < m; ++i) c.row_ids[i] = i;
  for (int j = 0; j < k; ++j) c.col_ids[j] = candidates[j].id;
  for (int i = 0; i < m; ++i) {
    if (!guess_world_pts[i].allFinite())
      throw std::invalid_argument("cost matrix: non-finite observation point");
    for (int j = 0; j < k; ++j)
      c.entries(i, j) = (guess_world_pts[i] - candidates[j].position).norm();
  }
  return c;
}

namespace {

Assignment make_assignment(const CostMatrix& c, const std::vector<int>& row_to_col) {
  Assignment a;
  for (int r = 0; r < c.rows(); ++r) {
    if (c.row_ids[r] < 0) continue;  // padding row
    const int col = row_to_col[r];
    if (col < 0 || c.col_ids[col] < 0) continue;  // unassigned or padding column
    a.pairs.emplace_back(r, col);
    a.total_cost += c.entries(r, col);
  }
  a.mean_cost = a.pairs.empty() ? 0.0 : a.total_cost / static_cast<double>(a.pairs.size());
  return a;
}

// ---------------------------------------------------------------------------
// Kuhn-Munkres with star/prime masks and row/column covers. Scans are in
// ascending index order throughout, which fixes the tie-breaking.
// ---------------------------------------------------------------------------
std::vector<int> munkres_square(Eigen::MatrixXd m) {
  const int n = static_cast<int>(m.rows());
  enum : std::uint8_t { kNone = 0, kStar = 1, kPrime = 2 };
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> mask =
      Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
  std::vector<char> row_cover(n, 0), col_cover(n, 0);

  for (int r = 0; r < n; ++r) m.row(r).array() -= m.row(r).minCoeff();
  for (int c = 0; c < n; ++c) m.col(c).array() -= m.col(c).minCoeff();

  // Greedy initial stars.
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (m(r, c) == 0.0 && !row_cover[r] && !col_cover[c]) {
        mask(r, c) = kStar;
        row_cover[r] = col_cover[c] = 1;
      }
  std::fill(row_cover.begin(), row_cover.end(), 0);
  std::fill(col_cover.begin(), col_cover.end(), 0);

  auto star_in_row = [&](int r) {
    for (int c = 0; c < n; ++c)
      if (mask(r, c) == kStar) return c;
    return -1;
  };
  auto star_in_col = [&](int c) {
    for (int r = 0; r < n; ++r)
      if (mask(r, c) == kStar) return r;
    return -1;
  };
  auto prime_in_row = [&](int r) {
    for (int c = 0; c < n; ++c)
      if (mask(r, c) == kPrime) return c;
    return -1;
  };

  while (true) {
    // Cover starred columns; done when all are covered.
    int covered = 0;
    for (int c = 0; c < n; ++c) {
      col_cover[c] = star_in_col(c) >= 0;
      covered += col_cover[c];
    }
    if (covered == n) break;

    while (true) {
      // Find an uncovered zero.
      int zr = -1, zc = -1;
      for (int r = 0; r < n && zr < 0; ++r) {
        if (row_cover[r]) continue;
        for (int c = 0; c < n; ++c)
          if (!col_cover[c] && m(r, c) == 0.0) {
            zr = r;
            zc = c;
            break;
          }
      }
      if (zr < 0) {
        // No uncovered zero: shift the smallest uncovered value.
        double delta = kInf;
        for (int r = 0; r < n; ++r) {
          if (row_cover[r]) continue;
          for (int c = 0; c < n; ++c)
            if (!col_cover[c]) delta = std::min(delta, m(r, c));
        }
        for (int r = 0; r < n; ++r)
          for (int c = 0; c < n; ++c) {
            if (row_cover[r] && col_cover[c]) m(r, c) += delta;
            else if (!row_cover[r] && !col_cover[c]) m(r, c) -= delta;
          }
        continue;
      }

      mask(zr, zc) = kPrime;
      const int sc = star_in_row(zr);
      if (sc >= 0) {
        row_cover[zr] = 1;
        col_cover[sc] = 0;
        continue;
      }

      // Augment along the alternating prime/star path starting at (zr, zc).
      std::vector<std::pair<int, int>> path{{zr, zc}};
      while (true) {
        const int r = star_in_col(path.back().second);
        if (r < 0) break;
        path.emplace_back(r, path.back().second);
        path.emplace_back(r, prime_in_row(r));
      }
      for (const auto& [r, c] : path) mask(r, c) = (mask(r, c) == kStar) ? kNone : kStar;
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
          if (mask(r, c) == kPrime) mask(r, c) = kNone;
      std::fill(row_cover.begin(), row_cover.end(), 0);
      std::fill(col_cover.begin(), col_cover.end(), 0);
      break;
    }
  }

  std::vector<int> row_to_col(n, -1);
  for (int r = 0; r < n; ++r) row_to_col[r] = star_in_row(r);
  return row_to_col;
}

// ---------------------------------------------------------------------------
// Jonker-Volgenant (square): column reduction, reduction transfer, two
// rounds of augmenting row reduction, then shortest augmenting paths.
// ---------------------------------------------------------------------------
std::vector<int> jv_square(const Eigen::MatrixXd& c) {
  const int n = static_cast<int>(c.rows());
  std::vector<int> rowsol(n, -1), colsol(n, -1);
  std::vector<double> u(n, 0.0), v(n, 0.0);

  // Column reduction, reverse column order.
  std::vector<int> matches(n, 0);
  for (int j = n - 1; j >= 0; --j) {
    double min_cost = c(0, j);
    int imin = 0;
    for (int i = 1; i < n; ++i)
      if (c(i, j) < min_cost) {
        min_cost = c(i, j);
        imin = i;
      }
    v[j] = min_cost;
    if (++matches[imin] == 1) {
      rowsol[imin] = j;
      colsol[j] = imin;
    } else if (v[j] < v[rowsol[imin]]) {
      const int j1 = rowsol[imin];
      rowsol[imin] = j;
      colsol[j] = imin;
      colsol[j1] = -1;
    } else {
      colsol[j] = -1;
    }
  }

  // Reduction transfer.
  std::vector<int> free_rows;
  free_rows.reserve(n);
  for (int i = 0; i < n; ++i) {
    if (matches[i] == 0) {
      free_rows.push_back(i);
    } else if (matches[i] == 1) {
      const int j1 = rowsol[i];
      double min_red = kInf;
      for (int j = 0; j < n; ++j)
        if (j != j1) min_red = std::min(min_red, c(i, j) - v[j]);
      v[j1] -= min_red;
    }
  }

  // Augmenting row reduction (two passes).
  for (int loop = 0; loop < 2; ++loop) {
    int k = 0;
    const int prev_free = static_cast<int>(free_rows.size());
    int num_free = 0;
    while (k < prev_free) {
      const int i = free_rows[k++];
      double umin = c(i, 0) - v[0], usubmin = kInf;
      int j1 = 0, j2 = -1;
      for (int j = 1; j < n; ++j) {
        const double h = c(i, j) - v[j];
        if (h < usubmin) {
          if (h >= umin) {
            usubmin = h;
            j2 = j;
          } else {
            usubmin = umin;
            j2 = j1;
            umin = h;
            j1 = j;
          }
        }
      }
      int i0 = colsol[j1];
      if (umin < usubmin) {
        v[j1] -= usubmin - umin;
      } else if (i0 >= 0) {
        j1 = j2;
        i0 = colsol[j1];
      }
      rowsol[i] = j1;
      colsol[j1] = i;
      if (i0 >= 0) {
        if (umin < usubmin)
          free_rows[--k] = i0;  // retry the bumped row immediately
        else
          free_rows[num_free++] = i0;
      }
    }
    free_rows.resize(num_free);
  }

  // Shortest augmenting path for each remaining free row.
  std::vector<double> d(n);
  std::vector<int> pred(n), collist(n);
  for (const int f : free_rows) {
    for (int j = 0; j < n; ++j) {
      d[j] = c(f, j) - v[j];
      pred[j] = f;
      collist[j] = j;
    }
    int low = 0, up = 0, last = -1, endofpath = -1;
    double mind = 0.0;
    bool found = false;
    while (!found) {
      if (up == low) {
        last = low - 1;
        mind = d[collist[up++]];
        for (int k = up; k < n; ++k) {
          const int j = collist[k];
          const double h = d[j];
          if (h <= mind) {
            if (h < mind) {
              up = low;
              mind = h;
            }
            collist[k] = collist[up];
            collist[up++] = j;
          }
        }
        for (int k = low; k < up; ++k)
          if (colsol[collist[k]] < 0) {
            endofpath = collist[k];
            found = true;
            break;
          }
      }
      if (!found) {
        const int j1 = collist[low++];
        const int i = colsol[j1];
        const double h = c(i, j1) - v[j1] - mind;
        for (int k = up; k < n; ++k) {
          const int j = collist[k];
          const double v2 = c(i, j) - v[j] - h;
          if (v2 < d[j]) {
            pred[j] = i;
            if (v2 == mind) {
              if (colsol[j] < 0) {
                endofpath = j;
                found = true;
                break;
              }
              collist[k] = collist[up];
              collist[up++] = j;
            }
            d[j] = v2;
          }
        }
      }
    }
    for (int k = 0; k <= last; ++k) {
      const int j1 = collist[k];
      v[j1] += d[j1] - mind;
    }
    int j = endofpath;
    int i;
    do {
      i = pred[j];
      colsol[j] = i;
      std::swap(rowsol[i], j);
    } while (i != f);
  }
  return rowsol;
}

// ---------------------------------------------------------------------------
// Rectangular shortest-augmenting-path solver (the "modified" JV): no
// initialization phases, one Dijkstra-style augmentation per row, duals
// updated from the shortest-path distances. Accepts m <= n directly.
// ---------------------------------------------------------------------------
std::vector<int> jv_modified_rect(const Eigen::MatrixXd& c) {
  const int m = static_cast<int>(c.rows());
  const int n = static_cast<int>(c.cols());
  std::vector<int> col4row(m, -1), row4col(n, -1);
  std::vector<double> u(m, 0.0), v(n, 0.0), shortest(n);
  std::vector<int> path(n);
  std::vector<char> visited_row(m), visited_col(n);

  for (int cur = 0; cur < m; ++cur) {
    std::fill(shortest.begin(), shortest.end(), kInf);
    std::fill(path.begin(), path.end(), -1);
    std::fill(visited_row.begin(), visited_row.end(), 0);
    std::fill(visited_col.begin(), visited_col.end(), 0);

    double min_val = 0.0;
    int i = cur, sink = -1;
    while (sink < 0) {
      visited_row[i] = 1;
      double lowest = kInf;
      int j_min = -1;
      for (int j = 0; j < n; ++j) {
        if (visited_col[j]) continue;
        const double r = min_val + c(i, j) - u[i] - v[j];
        if (r < shortest[j]) {
          shortest[j] = r;
          path[j] = i;
        }
        if (shortest[j] < lowest ||
            (j_min >= 0 && shortest[j] == lowest && row4col[j] < 0 && row4col[j_min] >= 0)) {
          lowest = shortest[j];
          j_min = j;
        }
      }
      if (!(lowest < kInf)) throw Error("assignment infeasible");
      min_val = lowest;
      visited_col[j_min] = 1;
      if (row4col[j_min] < 0)
        sink = j_min;
      else
        i = row4col[j_min];
    }

    u[cur] += min_val;
    for (int k = 0; k < m; ++k)
      if (visited_row[k] && k != cur) u[k] += min_val - shortest[col4row[k]];
    for (int j = 0; j < n; ++j)
      if (visited_col[j]) v[j] -= min_val - shortest[j];

    int j = sink;
    while (true) {
      const int i2 = path[j];
      row4col[j] = i2;
      std::swap(col4row[i2], j);
      if (i2 == cur) break;
    }
  }
  return col4row;
}

void require_square(const CostMatrix& c, const char* solver) {
  if (!c.is_square())
    throw ValidationError(std::string(solver) +
                          ": cost matrix must be square; pad the rectangular matrix first");
  if (c.rows() == 0) throw ValidationError(std::string(solver) + ": empty cost matrix");
}

}  // namespace

Assignment solve_lap_hungarian(const CostMatrix& c) {
  require_square(c, "hungarian");
  return make_assignment(c, munkres_square(c.entries));
}

Assignment solve_lap_jv(const CostMatrix& c) {
  require_square(c, "jv");
  return make_assignment(c, jv_square(c.entries));
}

Assignment solve_lap_jv_modified(const CostMatrix& c) {
  if (c.rows() == 0) throw ValidationError("jv_modified: empty cost matrix");
  if (c.rows() > c.cols())
    throw ValidationError("jv_modified: more rows than columns; pad columns first");
  return make_assignment(c, jv_modified_rect(c.entries));
}

// ---------------------------------------------------------------------------
// Landmark matching layer
// ---------------------------------------------------------------------------

const char* to_string(MatchStrategy s) {
  switch (s) {
    case MatchStrategy::Separate: return "separate";
    case MatchStrategy::Identical: return "identical";
    case MatchStrategy::ParallelBest: return "parallel-best";
  }
  return "?";
}

namespace {

// Post-fit residuals: rigid correction fitted from the matched guess points
// to their landmarks, distances measured after applying it. With fewer than
// two pairs (or coincident points) the raw distances stand in.
void set_postfit_errors(Matching& match, std::span<const Eigen::Vector2d> guess_pts,
                        const FieldMap& map) {
  match.mean_error = 0.0;
  match.max_error = 0.0;
  if (match.correspondences.empty()) return;

  PointPairSet pairs;
  for (const auto& [obs, lm_id] : match.correspondences) {
    pairs.body.push_back(guess_pts[obs]);
    pairs.world.push_back(map.by_id(lm_id).position);
  }

  Pose2d correction;  // identity fallback: raw distances
  if (pairs.size() >= 2) {
    try {
      correction = estimate_pose_kabsch(pairs).pose;
    } catch (const DegenerateGeometry&) {
    }
  }
  double sum = 0.0;
  for (int i = 0; i < pairs.size(); ++i) {
    const double d = (pairs.world[i] - correction * pairs.body[i]).norm();
    sum += d;
    match.max_error = std::max(match.max_error, d);
  }
  match.mean_error = sum / pairs.size();
}

// One assignment of the given observation subset against the given landmark
// subset; appends (observation index, landmark id) pairs.
void match_subset(std::span<const Eigen::Vector2d> guess_pts, const std::vector<int>& obs_idx,
                  const std::vector<Landmark>& candidates, Matching& out) {
  if (obs_idx.empty() || candidates.empty()) return;
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(obs_idx.size());
  for (const int i : obs_idx) pts.push_back(guess_pts[i]);
  const CostMatrix c = build_cost_matrix(pts, candidates);
  const Assignment a = solve_lap_jv_modified(c);
  for (const auto& [r, col] : a.pairs)
    out.correspondences.emplace_back(obs_idx[r], c.col_ids[col]);
}

Matching match_identical(std::span<const Eigen::Vector2d> guess_pts,
                         const FieldMap& map) {
  Matching match;
  match.strategy_used = MatchStrategy::Identical;
  std::vector<int> all_obs(guess_pts.size());
  for (std::size_t i = 0; i < guess_pts.size(); ++i) all_obs[i] = static_cast<int>(i);
  match_subset(guess_pts, all_obs, map.landmarks(), match);
  std::sort(match.correspondences.begin(), match.correspondences.end());
  set_postfit_errors(match, guess_pts, map);
  return match;
}

Matching match_separate(std::span<const Eigen::Vector2d> guess_pts,
                        std::span<const LandmarkClass> classes, const FieldMap& map) {
  Matching match;
  match.strategy_used = MatchStrategy::Separate;

  std::vector<int> leftover_obs;
  for (int k = 0; k < kNumLandmarkClasses; ++k) {
    const auto cls = static_cast<LandmarkClass>(k);
    std::vector<int> obs_idx;
    for (std::size_t i = 0; i < classes.size(); ++i)
      if (classes[i] == cls) obs_idx.push_back(static_cast<int>(i));
    if (obs_idx.empty()) continue;

    std::vector<Landmark> candidates;
    for (const int li : map.indices_of_class(cls)) candidates.push_back(map.landmarks()[li]);
    if (candidates.empty()) {
      // Observed class missing from the map: degrade to the shared pool.
      match.degraded_classes.push_back(cls);
      leftover_obs.insert(leftover_obs.end(), obs_idx.begin(), obs_idx.end());
      continue;
    }
    match_subset(guess_pts, obs_idx, candidates, match);
  }

  if (!leftover_obs.empty()) {
    std::vector<char> taken(map.landmarks().size(), 0);
    for (const auto& [obs, lm_id] : match.correspondences)
      for (std::size_t li = 0; li < map.landmarks().size(); ++li)
        if (map.landmarks()[li].id == lm_id) taken[li] = 1;
    std::vector<Landmark> remaining;
    for (std::size_t li = 0; li < map.landmarks().size(); ++li)
      if (!taken[li]) remaining.push_back(map.landmarks()[li]);
    match_subset(guess_pts, leftover_obs, remaining, match);
  }

  std::sort(match.correspondences.begin(), match.correspondences.end());
  set_postfit_errors(match, guess_pts, map);
  return match;
}

}  // namespace

Matching match_landmarks(std::span<const Eigen::Vector2d> guess_world_pts,
                         std::span<const LandmarkClass> classes, const FieldMap& map,
                         MatchStrategy strategy) {
  if (guess_world_pts.empty())
    throw InsufficientLandmarks("match_landmarks: no observations");
  if (guess_world_pts.size() != classes.size())
    throw std::invalid_argument("match_landmarks: point/class length mismatch");

  switch (strategy) {
    case MatchStrategy::Identical:
      return match_identical(guess_world_pts, map);
    case MatchStrategy::Separate:
      return match_separate(guess_world_pts, classes, map);
    case MatchStrategy::ParallelBest: {
      Matching sep = match_separate(guess_world_pts, classes, map);
      Matching ident = match_identical(guess_world_pts, map);
      // Classification is extra evidence: separate wins ties. strategy_used
      // records the winning branch so callers can see which one was kept.
      return (sep.mean_error <= ident.mean_error) ? std::move(sep) : std::move(ident);
    }
  }
  throw std::invalid_argument("unknown match strategy");
}

}  // namespace ilm
