#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>

#include <json.hpp>

#include "phmor/errors.hpp"
#include "phmor/matrixmarket.hpp"
#include "phmor/ph_system.hpp"

namespace phmor {

/// Result of loading a model directory: the standard-form system, plus the
/// descriptor matrices when the files were in descriptor form.
struct LoadedModel {
  PHSystem system;
  bool from_descriptor = false;
};

/// Loads a model described by a JSON manifest that names one MatrixMarket
/// file per matrix role. Standard form expects roles J, D, H, B (optional
/// x0); descriptor form expects E, Q, J, D, B (optional x0) and is converted
/// on the fly.
inline LoadedModel load_model(const std::string& manifest_path,
                              Index dense_limit = kDefaultDenseLimit,
                              Tolerances tol = {},
                              InitialStateConvention convention =
                                  InitialStateConvention::TransformForward) {
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot open model manifest: " + manifest_path);
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, std::string("model manifest is not valid JSON: ") + e.what());
  }
  if (!manifest.contains("matrices") || !manifest["matrices"].is_object())
    throw ConfigError("model manifest lacks a 'matrices' object");

  const auto dir = std::filesystem::path(manifest_path).parent_path();
  auto read_role = [&](const std::string& role) {
    const std::string rel = manifest["matrices"].at(role).get<std::string>();
    return read_matrix_market((dir / rel).string(), dense_limit);
  };
  const auto& mats = manifest["matrices"];
  auto has = [&](const char* role) { return mats.contains(role); };

  std::optional<Vector> x0;
  if (has("x0")) {
    Matrix col = read_role("x0");
    if (col.cols() != 1) throw ConfigError("x0 file must be a single column");
    x0 = col.col(0);
  }

  if (has("E") && has("Q")) {
    Matrix E = read_role("E"), Q = read_role("Q"), J = read_role("J"),
           D = read_role("D"), B = read_role("B");
    Vector x0t = x0.value_or(Vector::Zero(E.rows()));
    DescriptorPHSystem dsys(std::move(E), std::move(Q), std::move(J),
                            std::move(D), std::move(B), std::move(x0t), tol);
    return LoadedModel{descriptor_to_standard(dsys, convention), true};
  }
  if (!has("J") || !has("D") || !has("H") || !has("B"))
    throw ConfigError("model manifest must name either {J,D,H,B} or {E,Q,J,D,B}");

  Matrix J = read_role("J"), D = read_role("D"), H = read_role("H"),
         B = read_role("B");
  Vector x0v = x0.value_or(Vector::Zero(J.rows()));
  return LoadedModel{
      PHSystem(std::move(J), std::move(D), std::move(H), std::move(B),
               std::move(x0v), tol),
      false};
}

/// Writes a standard-form system as MatrixMarket files plus a role manifest.
/// Returns the manifest path.
inline std::string write_model(const std::string& dir, const PHSystem& sys,
                               const std::string& name = "model") {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  write_matrix_market((fs::path(dir) / "J.mtx").string(), sys.J());
  write_matrix_market((fs::path(dir) / "D.mtx").string(), sys.D());
  write_matrix_market((fs::path(dir) / "H.mtx").string(), sys.H());
  write_matrix_market((fs::path(dir) / "B.mtx").string(), sys.B());
  write_matrix_market_vector((fs::path(dir) / "x0.mtx").string(), sys.x0());

  nlohmann::json manifest = {
      {"format", "phmor-model"},
      {"name", name},
      {"n", sys.dim()},
      {"m", sys.n_inputs()},
      {"kind", "standard"},
      {"matrices",
       {{"J", "J.mtx"}, {"D", "D.mtx"}, {"H", "H.mtx"}, {"B", "B.mtx"}, {"x0", "x0.mtx"}}}};
  const std::string path = (fs::path(dir) / (name + ".json")).string();
  std::ofstream out(path);
  if (!out) throw IoError("cannot write model manifest: " + path);
  out << manifest.dump(2) << "\n";
  return path;
}

}  // namespace phmor
