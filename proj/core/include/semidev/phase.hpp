#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "semidev/params.hpp"
#include "semidev/rates.hpp"

namespace semidev {

enum class Regime {
  gaussian,
  transition1,
  max_jump,
  transition2,
  trunc_max_jump,
  transition3,
  t0,
  trivial,
};

const char* to_string(Regime regime);

struct RegimeInfo {
  Regime regime = Regime::gaussian;
  // Exponent s of the LDP speed N^s; absent for the trivial regime.
  std::optional<double> speed_exponent;
  std::optional<RateId> rate_id;
  // Populated on the alpha = beta + 1 boundary when no y was supplied: the
  // classification there depends on y.
  std::optional<std::string> y_condition;
};

// Regime of the (alpha, beta) configuration for the truncated model, with
// boundary equalities detected at relative tolerance 1e-12. Requires
// alpha > 1/2; on alpha = beta + 1 the result depends on y (condition
// reported when y is absent).
RegimeInfo classify(double alpha, double beta, const ModelParams& model,
                    double c, std::optional<double> y = {});

struct DiagramCell {
  double alpha = 0.0;
  double beta = 0.0;
  Regime regime = Regime::gaussian;
  bool y_dependent = false;
};

struct BoundaryLine {
  std::string name;
  std::vector<std::pair<double, double>> points;  // (alpha, beta)
};

struct Diagram {
  std::vector<DiagramCell> cells;
  std::vector<BoundaryLine> boundaries;
};

Diagram diagram_grid(const ModelParams& model, double c,
                     std::pair<double, double> alpha_range,
                     std::pair<double, double> beta_range, int resolution);

void write_diagram_csv(std::ostream& os, const Diagram& diagram);
std::string boundaries_json(const Diagram& diagram);

}  // namespace semidev
