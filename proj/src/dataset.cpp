#include "divsched/dataset.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace divsched {

std::vector<std::vector<double>> make_blob_means(const BlobSpec& spec, Rng& rng) {
  if (spec.num_classes < 1 || spec.dim < 1) {
    throw std::invalid_argument("make_blob_means: need at least one class and one dimension");
  }
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Random unit directions, then a global rescale so the closest pair of
  // means sits exactly separation_sigmas * sigma apart.
  std::vector<std::vector<double>> means(spec.num_classes, std::vector<double>(spec.dim));
  for (auto& mean : means) {
    double norm = 0.0;
    for (double& v : mean) {
      v = gauss(rng);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    if (norm < 1e-12) {
      mean.assign(spec.dim, 0.0);
      mean[0] = 1.0;
      norm = 1.0;
    }
    for (double& v : mean) v /= norm;
  }

  if (spec.num_classes == 1) return means;

  double min_dist = std::numeric_limits<double>::infinity();
  for (size_t a = 0; a < means.size(); ++a) {
    for (size_t b = a + 1; b < means.size(); ++b) {
      double d = 0.0;
      for (int j = 0; j < spec.dim; ++j) {
        const double diff = means[a][j] - means[b][j];
        d += diff * diff;
      }
      min_dist = std::min(min_dist, std::sqrt(d));
    }
  }
  if (min_dist < 1e-9) min_dist = 1e-9;
  const double scale = spec.separation_sigmas * spec.sigma / min_dist;
  for (auto& mean : means) {
    for (double& v : mean) v *= scale;
  }
  return means;
}

Sample draw_blob_sample(const BlobSpec& spec, const std::vector<std::vector<double>>& means,
                        int label, long long id, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, spec.sigma);
  Sample s;
  s.id = id;
  s.label = label;
  s.features.resize(spec.dim);
  for (int j = 0; j < spec.dim; ++j) {
    s.features[j] = means[label][j] + gauss(rng);
  }
  return s;
}

std::vector<Sample> make_balanced_set(const BlobSpec& spec,
                                      const std::vector<std::vector<double>>& means,
                                      int per_class, Rng& rng) {
  std::vector<Sample> set;
  set.reserve(static_cast<size_t>(per_class) * spec.num_classes);
  long long id = 0;
  for (int c = 0; c < spec.num_classes; ++c) {
    for (int i = 0; i < per_class; ++i) {
      set.push_back(draw_blob_sample(spec, means, c, id++, rng));
    }
  }
  return set;
}

std::vector<Sample> load_dataset_file(const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_dataset_file: cannot open " + path);
  }
  std::vector<Sample> samples;
  std::string line;
  long long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    for (char& c : line) {
      if (c == ',' || c == '\t' || c == ';') c = ' ';
    }
    std::istringstream row(line);
    Sample s;
    s.features.reserve(dim);
    double v;
    while (static_cast<int>(s.features.size()) < dim && row >> v) {
      s.features.push_back(v);
    }
    if (s.features.empty() && row.eof()) continue;  // blank line
    int label;
    if (static_cast<int>(s.features.size()) != dim || !(row >> label)) {
      throw std::runtime_error("load_dataset_file: line " + std::to_string(line_no) +
                               " does not hold " + std::to_string(dim) +
                               " floats followed by an integer label");
    }
    s.label = label;
    s.id = static_cast<long long>(samples.size());
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace divsched
