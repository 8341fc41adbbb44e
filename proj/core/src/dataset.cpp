#include "krv/dataset.hpp"

#include <cmath>

#include "krv/error.hpp"

namespace krv {

void Dataset::validate() const {
  if (instances.rows() < 1) throw Error(name + ": no instances");
  if (instances.cols() < 1) throw Error(name + ": no attributes");
  if (static_cast<Eigen::Index>(labels.size()) != instances.rows())
    throw Error(name + ": label count does not match instance count");
  if (num_classes() < 2) throw Error(name + ": fewer than two classes");
  if (attribute_kinds.size() != static_cast<std::size_t>(instances.cols()))
    throw Error(name + ": attribute kind count does not match column count");

  std::vector<int> counts(label_names.size(), 0);
  for (int y : labels) {
    if (y < 0 || y >= num_classes())
      throw Error(name + ": label id out of range");
    ++counts[static_cast<std::size_t>(y)];
  }
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0)
      throw Error(name + ": class '" + label_names[c] + "' has no instances");
  }
  if (!instances.allFinite())
    throw Error(name + ": non-finite attribute value");
}

Dataset Dataset::subset(const std::vector<int>& rows) const {
  Dataset out;
  out.name = name;
  out.attribute_kinds = attribute_kinds;
  out.label_names = label_names;
  out.instances.resize(static_cast<Eigen::Index>(rows.size()), instances.cols());
  out.labels.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    int r = rows[i];
    if (r < 0 || r >= instances.rows()) throw Error(name + ": subset row out of range");
    out.instances.row(static_cast<Eigen::Index>(i)) = instances.row(r);
    out.labels[i] = labels[static_cast<std::size_t>(r)];
  }
  return out;
}

std::vector<int> Dataset::class_counts() const {
  std::vector<int> counts(label_names.size(), 0);
  for (int y : labels) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

}  // namespace krv
