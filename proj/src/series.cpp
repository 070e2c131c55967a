#include "srrc/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace srrc {

void LabeledSeries::validate() const {
    if (values.empty())
        throw std::invalid_argument("series '" + name + "': empty");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]))
            throw std::invalid_argument("series '" + name + "': non-finite value at index " +
                                        std::to_string(i));
    }
    if (labels) {
        if (labels->size() != values.size())
            throw std::invalid_argument("series '" + name + "': label/value length mismatch");
        for (std::size_t i = 0; i < labels->size(); ++i) {
            if ((*labels)[i] > 1)
                throw std::invalid_argument("series '" + name + "': label not in {0,1} at index " +
                                            std::to_string(i));
        }
    }
}

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == delim) {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

int resolve_column(const std::vector<std::string>& header, const std::string& name,
                   int fallback_index, const char* what) {
    if (name.empty()) return fallback_index;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (trim(header[i]) == name) return static_cast<int>(i);
    }
    throw std::runtime_error(std::string("load_csv: ") + what + " column '" + name +
                             "' not found in header");
}

} // namespace

LabeledSeries load_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open '" + path + "'");

    LabeledSeries out;
    out.name = path;
    const bool want_labels =
        schema.label_column >= 0 || !schema.label_column_name.empty();
    if (want_labels) out.labels.emplace();

    int value_col = schema.value_column;
    int label_col = schema.label_column;

    std::string line;
    std::size_t line_no = 0;
    bool header_pending = schema.has_header;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_line(line, schema.delimiter);
        if (header_pending) {
            header_pending = false;
            value_col = resolve_column(fields, schema.value_column_name, value_col, "value");
            if (want_labels)
                label_col =
                    resolve_column(fields, schema.label_column_name, label_col, "label");
            continue;
        }
        if (value_col < 0 || static_cast<std::size_t>(value_col) >= fields.size())
            throw std::runtime_error("load_csv: line " + std::to_string(line_no) +
                                     ": missing value column");
        const std::string vstr = trim(fields[static_cast<std::size_t>(value_col)]);
        try {
            std::size_t pos = 0;
            double v = std::stod(vstr, &pos);
            if (pos != vstr.size()) throw std::invalid_argument("trailing characters");
            out.values.push_back(v);
        } catch (const std::exception&) {
            throw std::runtime_error("load_csv: line " + std::to_string(line_no) +
                                     ": cannot parse value '" + vstr + "'");
        }
        if (want_labels) {
            if (label_col < 0 || static_cast<std::size_t>(label_col) >= fields.size())
                throw std::runtime_error("load_csv: line " + std::to_string(line_no) +
                                         ": missing label column");
            const std::string lstr = trim(fields[static_cast<std::size_t>(label_col)]);
            if (lstr == "0")
                out.labels->push_back(0);
            else if (lstr == "1")
                out.labels->push_back(1);
            else
                throw std::runtime_error("load_csv: line " + std::to_string(line_no) +
                                         ": label '" + lstr + "' not in {0,1}");
        }
    }
    if (out.values.empty()) throw std::runtime_error("load_csv: no data rows in '" + path + "'");
    out.validate();
    return out;
}

void save_csv(const LabeledSeries& series, const std::string& path) {
    std::ofstream outf(path);
    if (!outf) throw std::runtime_error("save_csv: cannot open '" + path + "' for writing");
    const bool labeled = series.has_labels();
    outf << (labeled ? "timestamp,value,is_anomaly\n" : "timestamp,value\n");
    char buf[40];
    for (std::size_t t = 0; t < series.size(); ++t) {
        std::snprintf(buf, sizeof buf, "%.17g", series.values[t]);
        outf << t << ',' << buf;
        if (labeled) outf << ',' << static_cast<int>((*series.labels)[t]);
        outf << '\n';
    }
    if (!outf) throw std::runtime_error("save_csv: write failed for '" + path + "'");
}

LabeledSeries minmax_normalize(const LabeledSeries& series) {
    series.validate();
    const auto [lo_it, hi_it] =
        std::minmax_element(series.values.begin(), series.values.end());
    return minmax_normalize_with(series, *lo_it, *hi_it);
}

LabeledSeries minmax_normalize_with(const LabeledSeries& series, double lo, double hi) {
    LabeledSeries out = series;
    const double range = hi - lo;
    if (range == 0.0) {
        std::fill(out.values.begin(), out.values.end(), 0.0);
        return out;
    }
    for (auto& v : out.values) v = (v - lo) / range;
    return out;
}

namespace {

LabeledSeries slice(const LabeledSeries& s, std::size_t begin, std::size_t end,
                    const char* tag) {
    LabeledSeries out;
    out.name = s.name.empty() ? tag : s.name + ":" + tag;
    out.values.assign(s.values.begin() + static_cast<std::ptrdiff_t>(begin),
                      s.values.begin() + static_cast<std::ptrdiff_t>(end));
    if (s.labels)
        out.labels.emplace(s.labels->begin() + static_cast<std::ptrdiff_t>(begin),
                           s.labels->begin() + static_cast<std::ptrdiff_t>(end));
    return out;
}

} // namespace

SplitCounts split_counts(std::size_t total, double train_frac, double val_frac) {
    if (!(train_frac > 0.0 && val_frac > 0.0 && train_frac + val_frac < 1.0))
        throw std::invalid_argument("split_counts: fractions must be positive and sum below 1");
    // floor(frac * T) evaluated exactly: fractions are four-decimal values,
    // so scale to basis points and use integer division.
    const auto basis = [](double frac) {
        return static_cast<std::size_t>(std::llround(frac * 10000.0));
    };
    SplitCounts c;
    c.train = basis(train_frac) * total / 10000;
    c.validation = basis(val_frac) * total / 10000;
    if (c.train + c.validation > total)
        throw std::invalid_argument("split_counts: fractions exceed the series length");
    c.test = total - c.train - c.validation;
    return c;
}

SplitSeries holdout_split(const LabeledSeries& series, double train_frac,
                          double val_frac) {
    series.validate();
    const std::size_t T = series.size();
    if (T < 10)
        throw std::invalid_argument("holdout_split: series too short (T=" +
                                    std::to_string(T) + ", need >= 10)");
    const SplitCounts c = split_counts(T, train_frac, val_frac);
    if (c.train < 1 || c.validation < 1 || c.test < 1)
        throw std::invalid_argument("holdout_split: split leaves an empty segment");
    SplitSeries out;
    out.train = slice(series, 0, c.train, "train");
    out.validation = slice(series, c.train, c.train + c.validation, "validation");
    out.test = slice(series, c.train + c.validation, T, "test");
    return out;
}

} // namespace srrc
