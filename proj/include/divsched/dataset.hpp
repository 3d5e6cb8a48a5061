#pragma once

#include <string>
#include <vector>

#include "divsched/rng.hpp"

namespace divsched {

/// One labeled feature vector. Ids are unique within a run and order
/// selection ties deterministically.
struct Sample {
  long long id = 0;
  int label = 0;
  std::vector<double> features;
};

/// Synthetic labeled data: isotropic Gaussian blobs whose class means are
/// random directions scaled so the minimum pairwise mean distance equals
/// separation_sigmas * sigma.
struct BlobSpec {
  int num_classes = 10;
  int dim = 8;
  double sigma = 1.0;
  double separation_sigmas = 4.0;
};

/// Class means for the blob generator; deterministic given the rng state.
std::vector<std::vector<double>> make_blob_means(const BlobSpec& spec, Rng& rng);

/// Draws one sample of the given class around its mean.
Sample draw_blob_sample(const BlobSpec& spec, const std::vector<std::vector<double>>& means,
                        int label, long long id, Rng& rng);

/// A balanced test set: per_class samples of every class.
std::vector<Sample> make_balanced_set(const BlobSpec& spec,
                                      const std::vector<std::vector<double>>& means,
                                      int per_class, Rng& rng);

/// Loads delimited text: one row per sample, dim floats then an integer
/// label, separated by spaces or commas. Throws std::runtime_error with the
/// offending line on malformed input.
std::vector<Sample> load_dataset_file(const std::string& path, int dim);

}  // namespace divsched
