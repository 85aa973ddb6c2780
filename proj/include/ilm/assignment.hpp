#pragma once

#include <Eigen/Core>

#include <span>
#include <utility>
#include <vector>

#include "ilm/field_map.hpp"

namespace ilm {

/// Distance cost matrix between observed points (rows) and candidate map
/// landmarks (columns). Rows never exceed columns: when there are more
/// observations than candidates the matrix is squared up with zero-cost
/// padding columns. Solvers may additionally pad rows to make it square;
/// padding rows/columns carry id -1 and are stripped from results.
struct CostMatrix {
  Eigen::MatrixXd entries;
  std::vector<int> row_ids;  // observation indices; -1 for padding rows
  std::vector<int> col_ids;  // landmark ids; -1 for padding columns
  int padding_rows = 0;
  int padding_cols = 0;

  int rows() const { return static_cast<int>(entries.rows()); }
  int cols() const { return static_cast<int>(entries.cols()); }
  int real_rows() const { return rows() - padding_rows; }
  int real_cols() const { return cols() - padding_cols; }
  bool is_square() const { return rows() == cols(); }

  /// Same problem padded with zero-cost rows until square. A minimizing
  /// square assignment restricted to the real rows solves the rectangular
  /// problem, because every completion assigns the dummies at zero cost.
  CostMatrix padded_square() const;
};

/// Euclidean distances between each guess point and each candidate landmark.
/// Pads zero columns when points outnumber candidates. Both lists must be
/// nonempty and finite.
CostMatrix build_cost_matrix(std::span<const Eigen::Vector2d> guess_world_pts,
                             std::span<const Landmark> candidates);

/// One-to-one minimum-cost assignment. Pairs cover every real row (pairs
/// whose row or column is padding are dropped); total_cost sums the kept
/// entries in row order so all solvers report bit-identical optima.
struct Assignment {
  std::vector<std::pair<int, int>> pairs;  // (row, col) sorted by row
  double total_cost = 0.0;
  double mean_cost = 0.0;
};

/// Kuhn-Munkres (Hungarian). Requires a square matrix (pad first).
Assignment solve_lap_hungarian(const CostMatrix& c);

/// Jonker-Volgenant shortest augmenting path with column reduction and
/// augmenting row reduction. Requires a square matrix (pad first).
Assignment solve_lap_jv(const CostMatrix& c);

/// Rectangular shortest augmenting path variant: no reduction phases, one
/// Dijkstra-style augmentation per row, accepts rows <= cols directly.
Assignment solve_lap_jv_modified(const CostMatrix& c);

enum class MatchStrategy {
  Separate,      // one assignment per landmark class
  Identical,     // single class-agnostic assignment
  ParallelBest,  // run both, keep the one with smaller post-fit mean error
};

const char* to_string(MatchStrategy s);

/// Observation-to-landmark correspondence set. mean_error/max_error are
/// *post-fit* residuals: a rigid correction is fitted (least squares) from
/// the guess points to their matched landmarks and pair distances are
/// measured after applying it. This is the quality signal strategy selection
/// and the outlier/global-localization thresholds act on; raw pre-fit LAP
/// cost would always favor class-agnostic matching.
struct Matching {
  std::vector<std::pair<int, int>> correspondences;  // (observation index, landmark id)
  double mean_error = 0.0;
  double max_error = 0.0;
  // Strategy that produced the pairs; a ParallelBest run records the winning
  // branch (Separate or Identical) here.
  MatchStrategy strategy_used = MatchStrategy::Identical;
  std::vector<LandmarkClass> degraded_classes;  // classes folded into the shared pool
};

/// Matches world-projected observations against the map with the requested
/// strategy (solver: modified JV). Separate runs one assignment per class;
/// classes present in the observations but absent from the map degrade to a
/// pooled match against the still-unassigned landmarks and are flagged.
Matching match_landmarks(std::span<const Eigen::Vector2d> guess_world_pts,
                         std::span<const LandmarkClass> classes, const FieldMap& map,
                         MatchStrategy strategy);

}  // namespace ilm
