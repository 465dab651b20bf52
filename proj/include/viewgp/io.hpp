#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "viewgp/camsim.hpp"
#include "viewgp/experiments.hpp"
#include "viewgp/kernels.hpp"

namespace viewgp::io {

namespace fs = std::filesystem;

/// 17 significant digits; parses back to the identical double.
std::string format_double(double v);

// Pose CSV: frame,px,py,pz,qw,qx,qy,qz with q canonicalized (qw >= 0).
void write_poses_csv(const fs::path& path, std::span<const Pose> poses);
/// Rows must carry frames 0, 1, 2, ... in order. Malformed rows throw
/// invalid-input naming the line number.
std::vector<Pose> read_poses_csv(const fs::path& path);

// Track CSV: track,frame,u,v,split with split in {train, test}. Frames index
// into the pose file written next to it.
void write_tracks_csv(const fs::path& path, const TrackDataset& data);
TrackDataset read_tracks_csv(const fs::path& path, std::span<const Pose> poses);

// Codes CSV: frame,c0,...,c{d-1}.
void write_codes_csv(const fs::path& path, const Eigen::MatrixXd& codes);
Eigen::MatrixXd read_codes_csv(const fs::path& path);

/// Headerless numeric matrix.
void write_matrix_csv(const fs::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(const fs::path& path);

/// Binary 8-bit PGM, min-max normalized; bounds go to a `<stem>.json` sidecar.
void write_pgm(const fs::path& path, const Eigen::MatrixXd& m);

/// Kernel documents: {"family": ..., "params": {...}}. pose_product adds
/// "orientation": "<family>" and takes dotted parameter names such as
/// "translation.lengthscale" or "orientation.variance". Omitted parameters
/// default to 1; unknown keys are rejected.
KernelSpec kernel_from_json(const nlohmann::json& doc);
nlohmann::json kernel_to_json(const KernelSpec& spec);
/// Inline JSON text, or a path to a file holding it.
nlohmann::json load_json_argument(const std::string& text_or_path);

nlohmann::json report_to_json(const ExperimentReport& report);
std::string report_to_text(const ExperimentReport& report);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

}  // namespace viewgp::io
