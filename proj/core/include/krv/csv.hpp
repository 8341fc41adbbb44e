#pragma once

#include <string>
#include <variant>

#include "krv/dataset.hpp"

namespace krv {

// Selects the label column either by 0-based index (negative counts from the
// end, -1 = last column) or by header name (requires a header row).
using LabelColumn = std::variant<int, std::string>;

// Loads a comma-separated UTF-8 file into a Dataset.
//
// The first row is treated as a header when any of its fields fails to parse
// as a number. Columns whose data fields all parse as numbers are real (or
// integer when every value is integral); any other column is nominal and is
// expanded into one 0/1 column per distinct level, in first-appearance
// order. Class labels are mapped to 0..C-1 in first-appearance order.
//
// Errors: missing file, ragged rows, empty fields, single-class files,
// a header-name selector without a header row, out-of-range selectors.
Dataset load_csv(const std::string& path, const LabelColumn& label_column = -1);

}  // namespace krv
