#pragma once

#include "hypertrust/dataset.hpp"
#include "hypertrust/evaluation.hpp"
#include "hypertrust/hgnn.hpp"
#include "hypertrust/hypergraph.hpp"
#include "hypertrust/trainer.hpp"
#include "hypertrust/trust.hpp"
#include "hypertrust/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace hypertrust {

// --- dataset files ---------------------------------------------------------
//
// A dataset directory holds five CSV files with header rows:
//   nodes.csv           id,x,y,device_type
//   links.csv           src,dst
//   friendships.csv     src,dst
//   interests.csv       node_id,interest_id
//   collaborations.csv  task_id,members,success   (members ;-separated)

// Loads and fully validates a dataset; failures name the file and line.
Dataset load_dataset(const std::filesystem::path& dir);

// Writes the five CSV files (atomically, temp + rename).
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);

struct SynthKnobs {
    double link_prob = 0.04;
    double friend_prob = 0.04;
    int n_interests = 20;
    int interests_per_device = 3;
    int n_collabs = 150;
    double collab_success_rate = 0.85;
    int n_types = 3;
};

// Schema-complete synthetic dataset: positions uniform in [0,1]^2, one of
// n_types type labels per device, Erdos-Renyi link/friendship graphs,
// interests sampled without replacement, collaborations of 2-4 members
// biased toward friends. Deterministic per seed.
Dataset generate_synthetic(Index n, std::uint64_t seed, const SynthKnobs& knobs = SynthKnobs{});

// --- hypergraph file -------------------------------------------------------

void save_hypergraph(const Hypergraph& g, const std::filesystem::path& file);
Hypergraph load_hypergraph(const std::filesystem::path& file);

// --- checkpoint ------------------------------------------------------------
//
// Binary layout: magic "HTRUSTCK", u32 version, u64 config hash, u32 matrix
// count, per-matrix u32 rows / u32 cols, then row-major little-endian
// doubles.

void save_checkpoint(const HgnnParams& params, std::uint64_t config_hash,
                     const std::filesystem::path& file);

struct Checkpoint {
    HgnnParams params;
    std::uint64_t config_hash = 0;
};

Checkpoint load_checkpoint(const std::filesystem::path& file);

// --- train config ----------------------------------------------------------

// Flat key=value text config mirroring TrainConfig (unknown keys rejected).
TrainConfig config_from_file(const std::filesystem::path& file);
TrainConfig config_from_string(const std::string& text);
std::string config_to_string(const TrainConfig& config);
std::uint64_t config_hash(const TrainConfig& config);

// --- CSV / JSON exports ----------------------------------------------------

// 17-significant-digit decimal; import(export(x)) is exact.
void save_embeddings_csv(const Matrix& embeddings, const std::filesystem::path& file);
Matrix load_embeddings_csv(const std::filesystem::path& file);

void save_loss_history_csv(const std::vector<LossBreakdown>& history, const std::filesystem::path& file);

void save_ranking_csv(const TrustRanking& ranking, const std::filesystem::path& file, int top_k = -1);
void save_ranking_json(const TrustRanking& ranking, const TrainConfig& config,
                       const std::filesystem::path& file, int top_k = -1);

void save_heatmap_csv(const SensitivityGrid& grid, const std::filesystem::path& file);
void save_histogram_csv(const TrustHistogram& hist, const std::filesystem::path& file);
void save_scaling_csv(const std::vector<ScalingRow>& rows, const std::filesystem::path& file);
void save_projection_csv(const Matrix& projected, const std::vector<std::string>& group_labels,
                         const std::filesystem::path& file);

void save_run_metadata(const TrainConfig& config, const std::filesystem::path& file);

// --- small utilities -------------------------------------------------------

// Atomic text write: temp file in the same directory, then rename.
void write_file_atomic(const std::filesystem::path& file, const std::string& content);

std::uint64_t fnv1a_hash(const std::string& bytes);
std::uint64_t hash_file(const std::filesystem::path& file);

std::string format_double(double v); // %.17g

} // namespace hypertrust
