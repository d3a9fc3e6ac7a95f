#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfcdd/schwarz.hpp"

namespace sfcdd {

enum class LevelRule { Explicit, WeakScaling, Isotropic, StrongScaling };
enum class QRule { Fixed, ScaledS, ScaledNP };
enum class SolverKind { Richardson, Pcg, PcgFlexible };
enum class XiRule { Optimal, Explicit };

// Declarative description of a study. A config spans a grid of points:
// the cartesian product of the processor counts and fault probabilities,
// enumerated with P outermost. Sizes are derived per point from the level
// rule:
//   explicit        levels given directly, P-independent
//   weak-scaling    d = 1 line grid with N = 2^S * P
//   isotropic       refinement bits spread over d dimensions (leading
//                   dimensions take the remainder), total chosen so the
//                   grid size is nearest P * 2^S in log scale
//   strong-scaling  L refinement bits spread over d dimensions, P-independent
// and the coarse dimension per subdomain from the q rule:
//   fixed           q given directly
//   scaled-S        q = 2^(S-4)
//   scaled-NP       q = 2^(floor(log2(N/P)) - 4)
struct ExperimentConfig {
  int d = 1;
  LevelRule level_rule = LevelRule::Explicit;
  std::vector<int> levels;
  int S = 0;
  int L = 0;
  std::vector<int> P_values{1};
  QRule q_rule = QRule::Fixed;
  int q = 1;
  double gamma = 1.0;
  Variant variant = Variant::PlainTwoLevel;
  Weighting weighting = Weighting::None;
  SolverKind solver = SolverKind::Pcg;
  XiRule xi_rule = XiRule::Optimal;
  double xi = 1.0;
  std::vector<double> p_fault{0.0};
  int runs = 1;
  uint64_t seed = 0;
  double tol = 1e-8;
  int max_iter = 1000;
};

// flat key = value lines, '#' starts a comment, later keys win
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// canonical text form; parse_config(dump_config(c)) reproduces c
std::string dump_config(const ExperimentConfig& cfg);

const char* level_rule_name(LevelRule r);
const char* q_rule_name(QRule r);
const char* solver_name(SolverKind s);
const char* xi_rule_name(XiRule r);
const char* variant_name(Variant v);
const char* weighting_name(Weighting w);

}  // namespace sfcdd
