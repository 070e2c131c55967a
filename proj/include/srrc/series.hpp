#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace srrc {

/// A finite real-valued series with optional binary anomaly labels.
/// Invariants: values are finite, labels (if present) have the same length
/// and are exactly 0 or 1. Immutable by convention once constructed.
struct LabeledSeries {
    std::vector<double> values;
    std::optional<std::vector<std::uint8_t>> labels;
    std::string name;

    std::size_t size() const { return values.size(); }
    bool has_labels() const { return labels.has_value(); }

    /// Throws std::invalid_argument on any invariant violation.
    void validate() const;
};

/// Contiguous train/validation/test partition of a series.
struct SplitSeries {
    LabeledSeries train;
    LabeledSeries validation;
    LabeledSeries test;
};

/// Column mapping for CSV ingestion. Columns are 0-based indices; a column
/// can also be referenced by header name when has_header is true.
struct CsvSchema {
    bool has_header = true;
    int value_column = 1;
    int label_column = 2;   // -1: no label column
    std::string value_column_name;  // non-empty overrides the index
    std::string label_column_name;
    char delimiter = ',';
};

/// Parses a CSV file into a LabeledSeries preserving row order.
/// Errors carry the offending 1-based physical line number.
LabeledSeries load_csv(const std::string& path, const CsvSchema& schema);

/// Writes a series as timestamp,value[,is_anomaly] with a header row.
/// Floats are serialized with 17 significant digits.
void save_csv(const LabeledSeries& series, const std::string& path);

/// Maps each value to (u - min) / (max - min). A constant series maps to
/// all zeros. Labels pass through unchanged.
LabeledSeries minmax_normalize(const LabeledSeries& series);

/// Same affine map with externally supplied statistics (e.g. train-split
/// min/max applied to the full series).
LabeledSeries minmax_normalize_with(const LabeledSeries& series, double lo, double hi);

/// Row counts for the contiguous split: train = floor(train_frac*T),
/// validation = floor(val_frac*T), test = remainder. Fractions are treated
/// as exact four-decimal values so e.g. 0.49 of 3000 is 1470, immune to the
/// binary representation of the fraction.
struct SplitCounts {
    std::size_t train = 0;
    std::size_t validation = 0;
    std::size_t test = 0;
};

SplitCounts split_counts(std::size_t total, double train_frac, double val_frac);

/// Contiguous split per split_counts. Requires T >= 10 and every segment
/// nonempty.
SplitSeries holdout_split(const LabeledSeries& series, double train_frac = 0.49,
                          double val_frac = 0.21);

} // namespace srrc
