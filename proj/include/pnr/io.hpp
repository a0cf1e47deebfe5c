#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "pnr/calibrate.hpp"
#include "pnr/fock.hpp"
#include "pnr/hmm.hpp"
#include "pnr/multimode.hpp"
#include "pnr/simulate.hpp"

namespace pnr {

// ProbVector: CSV is one value per line under a `p` header; JSON is
// { "label": ..., "p": [...] } plus "unprojected" when set.
std::string probvector_to_csv(const ProbVector& v);
ProbVector probvector_from_csv(const std::string& text, Label label);
nlohmann::json probvector_to_json(const ProbVector& v);
ProbVector probvector_from_json(const nlohmann::json& j);

// Row-major numeric CSV, no header.
std::string matrix_to_csv(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_csv(const std::string& text);

// Confusion matrix persists as CSV plus a JSON sidecar (<path>.meta.json)
// carrying the params hash.
void save_confusion(const std::string& csv_path, const ConfusionMatrix& c);
ConfusionMatrix load_confusion(const std::string& csv_path);

// Shot archive: JSONL, one record per line.
nlohmann::json shot_to_json(const ShotRecord& shot);
ShotRecord shot_from_json(const nlohmann::json& j);
std::string shots_to_jsonl(const std::vector<ShotRecord>& shots);
std::vector<ShotRecord> shots_from_jsonl(const std::string& text);

// Sparse joint distribution: JSONL of { "digits": [ints], "p": float }.
std::string sparse_to_jsonl(const SparseDist& dist);
SparseDist sparse_from_jsonl(const std::string& text);

nlohmann::json calibration_to_json(const CalibrationSet& cal);
CalibrationSet calibration_from_json(const nlohmann::json& j);

// Whole-file helpers.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace pnr
