#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "krv/dataset.hpp"
#include "krv/rng.hpp"

namespace krv::testing {

inline std::string data_path(const std::string& file) {
  return std::string(KRV_DATA_DIR) + "/" + file;
}

// Writes content to a unique temp file and removes it on destruction.
class TempFile {
 public:
  explicit TempFile(const std::string& content, const std::string& tag = "t") {
    static int counter = 0;
    path_ = (std::filesystem::temp_directory_path() /
             ("krv_test_" + tag + std::to_string(counter++) + ".csv"))
                .string();
    std::ofstream os(path_);
    os << content;
  }
  ~TempFile() { std::filesystem::remove(path_); }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Gaussian blobs, one cluster per class, evenly sized (remainder to the
// first classes). Cluster centers are spread on a scaled simplex.
inline Dataset random_blobs(Rng& rng, int n, int d, int c, double spread = 3.0) {
  Dataset ds;
  ds.name = "blobs";
  ds.instances.resize(n, d);
  ds.labels.resize(static_cast<std::size_t>(n));
  for (int cls = 0; cls < c; ++cls) ds.label_names.push_back("c" + std::to_string(cls));
  ds.attribute_kinds.assign(static_cast<std::size_t>(d), AttrKind::real);
  for (int i = 0; i < n; ++i) {
    int cls = i % c;
    ds.labels[static_cast<std::size_t>(i)] = cls;
    for (int j = 0; j < d; ++j) {
      double center = (j % c == cls) ? spread : 0.0;
      ds.instances(i, j) = center + rng.normal();
    }
  }
  return ds;
}

// Two 10-point clusters at (0,0) and (3,3) with small isotropic noise.
inline Dataset two_clusters(Rng& rng, int per_cluster = 10, double noise = 0.5) {
  Dataset ds;
  ds.name = "two_clusters";
  int n = 2 * per_cluster;
  ds.instances.resize(n, 2);
  ds.labels.resize(static_cast<std::size_t>(n));
  ds.label_names = {"a", "b"};
  ds.attribute_kinds = {AttrKind::real, AttrKind::real};
  for (int i = 0; i < n; ++i) {
    int cls = (i < per_cluster) ? 0 : 1;
    double cx = cls == 0 ? 0.0 : 3.0;
    ds.labels[static_cast<std::size_t>(i)] = cls;
    ds.instances(i, 0) = cx + noise * rng.normal();
    ds.instances(i, 1) = cx + noise * rng.normal();
  }
  return ds;
}

}  // namespace krv::testing
