#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hermite_nc/fields.hpp"
#include "hermite_nc/quadrature.hpp"

namespace hermite_nc {

inline nlohmann::json grid_to_json(const QuadratureGrid& g) {
  nlohmann::json j;
  j["dim"] = g.dim();
  j["kind"] = g.kind() == QuadratureGrid::Kind::kGaussHermite ? "gauss-hermite"
                                                              : "uniform";
  j["axes"] = nlohmann::json::array();
  for (int ax = 0; ax < g.dim(); ++ax)
    j["axes"].push_back({{"nodes", g.axis_nodes(ax)},
                         {"weights", g.axis_weights(ax)},
                         {"lebesgue_weights", g.axis_lebesgue_weights(ax)}});
  return j;
}

inline QuadratureGrid grid_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind != "gauss-hermite" && kind != "uniform")
    throw std::invalid_argument("grid_from_json: unknown kind " + kind);
  std::vector<GaussRule> axes;
  for (const auto& a : j.at("axes")) {
    GaussRule r;
    a.at("nodes").get_to(r.nodes);
    a.at("weights").get_to(r.weights);
    a.at("lebesgue_weights").get_to(r.lebesgue_weights);
    axes.push_back(std::move(r));
  }
  if (j.at("dim").get<int>() != static_cast<int>(axes.size()))
    throw std::invalid_argument("grid_from_json: dim/axes mismatch");
  return QuadratureGrid::from_axes(kind == "uniform"
                                       ? QuadratureGrid::Kind::kUniform
                                       : QuadratureGrid::Kind::kGaussHermite,
                                   std::move(axes));
}

/// Self-describing container: grid spec + row-major [re, im] matrix
/// entries per grid point.
inline nlohmann::json field_to_json(const MatrixField& f) {
  nlohmann::json j;
  j["grid"] = grid_to_json(f.grid);
  j["matrix_size"] = f.matrix_size;
  j["hermitian"] = f.hermitian;
  j["positive"] = f.positive;
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& m : f.samples) {
    nlohmann::json entry = nlohmann::json::array();
    for (int r = 0; r < f.matrix_size; ++r)
      for (int c = 0; c < f.matrix_size; ++c)
        entry.push_back({m(r, c).real(), m(r, c).imag()});
    samples.push_back(std::move(entry));
  }
  j["samples"] = std::move(samples);
  return j;
}

inline MatrixField field_from_json(const nlohmann::json& j) {
  MatrixField f(grid_from_json(j.at("grid")), j.at("matrix_size").get<int>());
  f.hermitian = j.at("hermitian").get<bool>();
  f.positive = j.at("positive").get<bool>();
  const auto& samples = j.at("samples");
  if (samples.size() != f.size())
    throw std::invalid_argument("field_from_json: sample count mismatch");
  const int n = f.matrix_size;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto& entry = samples[i];
    if (static_cast<int>(entry.size()) != n * n)
      throw std::invalid_argument("field_from_json: matrix shape mismatch");
    for (int e = 0; e < n * n; ++e)
      f.samples[i](e / n, e % n) = {entry[e][0].get<double>(),
                                    entry[e][1].get<double>()};
  }
  return f;
}

}  // namespace hermite_nc
