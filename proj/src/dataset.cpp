#include "tsgp/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>
#include <string_view>

#include "tsgp/error.hpp"
#include "tsgp/rng.hpp"

namespace tsgp {

namespace {

std::vector<std::string_view> split_fields(std::string_view line, char separator)
{
    std::vector<std::string_view> fields;
    if (separator == '\t' || separator == ',') {
        std::size_t pos = 0;
        while (true) {
            std::size_t next = line.find(separator, pos);
            fields.push_back(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
            if (next == std::string_view::npos) {
                break;
            }
            pos = next + 1;
        }
        return fields;
    }
    // whitespace-separated fallback
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) {
            ++pos;
        }
        if (pos >= line.size()) {
            break;
        }
        std::size_t end = pos;
        while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) {
            ++end;
        }
        fields.push_back(line.substr(pos, end - pos));
        pos = end;
    }
    return fields;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

double parse_number(std::string_view field, std::size_t line_no)
{
    field = trim(field);
    if (!field.empty() && field.front() == '+') {
        field.remove_prefix(1);
    }
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (field.empty() || ec != std::errc() || ptr != last) {
        throw Error(ErrorKind::NonNumericField,
            "line " + std::to_string(line_no) + ": '" + std::string(field) + "' is not a number");
    }
    if (!std::isfinite(value)) {
        throw Error(ErrorKind::NonFiniteValue, "line " + std::to_string(line_no) + ": non-finite value");
    }
    return value;
}

std::string format_label(double label)
{
    std::ostringstream os;
    if (label == std::floor(label) && std::abs(label) < 1e15) {
        os << static_cast<long long>(label);
    } else {
        os << std::setprecision(17) << label;
    }
    return os.str();
}

} // namespace

std::vector<int> Dataset::labels() const
{
    std::vector<int> out;
    out.reserve(series.size());
    for (const auto& s : series) {
        out.push_back(s.label);
    }
    return out;
}

std::vector<std::size_t> Dataset::class_counts() const
{
    std::vector<std::size_t> counts(n_classes(), 0);
    for (const auto& s : series) {
        if (s.label >= 0 && static_cast<std::size_t>(s.label) < counts.size()) {
            ++counts[static_cast<std::size_t>(s.label)];
        }
    }
    return counts;
}

Dataset parse_ucr(std::istream& in, const std::string& name, char separator, const LoadOptions& options)
{
    Dataset d;
    d.name = name;
    std::vector<double> raw_labels;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (trim(line).empty()) {
            continue;
        }
        auto fields = split_fields(line, separator);
        TimeSeries ts;
        std::size_t first_value = 0;
        if (options.has_labels) {
            raw_labels.push_back(parse_number(fields.front(), line_no));
            first_value = 1;
        }
        ts.values.reserve(fields.size() - first_value);
        for (std::size_t i = first_value; i < fields.size(); ++i) {
            ts.values.push_back(parse_number(fields[i], line_no));
        }
        if (d.series.empty()) {
            width = ts.values.size();
        } else if (ts.values.size() != width) {
            throw Error(ErrorKind::RaggedRows, "line " + std::to_string(line_no) + " has " + std::to_string(ts.values.size())
                    + " values, expected " + std::to_string(width));
        }
        d.series.push_back(std::move(ts));
    }
    if (d.series.empty()) {
        throw Error(ErrorKind::EmptyFile, "no instances in '" + name + "'");
    }
    if (width < 2) {
        throw Error(ErrorKind::SeriesTooShort, "series length " + std::to_string(width) + " < 2");
    }
    if (options.has_labels) {
        std::vector<double> distinct = raw_labels;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        if (distinct.size() < options.min_classes) {
            throw Error(ErrorKind::SingleClass, "'" + name + "' has " + std::to_string(distinct.size()) + " distinct label(s)");
        }
        for (std::size_t i = 0; i < d.series.size(); ++i) {
            auto it = std::lower_bound(distinct.begin(), distinct.end(), raw_labels[i]);
            d.series[i].label = static_cast<int>(it - distinct.begin());
        }
        d.original_labels = distinct;
        d.class_labels.resize(distinct.size());
        std::iota(d.class_labels.begin(), d.class_labels.end(), 0);
    }
    return d;
}

Dataset load_ucr_tsv(const std::filesystem::path& path, const LoadOptions& options)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::FileNotFound, "cannot open '" + path.string() + "'");
    }
    char separator = options.separator;
    if (separator == 0) {
        separator = path.extension() == ".csv" ? ',' : '\t';
    }
    return parse_ucr(in, path.stem().string(), separator, options);
}

void write_ucr_tsv(const Dataset& d, std::ostream& out)
{
    std::ostringstream row;
    row << std::setprecision(17);
    for (const auto& s : d.series) {
        row.str({});
        bool first = true;
        if (d.labeled()) {
            row << format_label(d.original_labels.at(static_cast<std::size_t>(s.label)));
            first = false;
        }
        for (double v : s.values) {
            if (!first) {
                row << '\t';
            }
            row << v;
            first = false;
        }
        out << row.str() << '\n';
    }
}

Dataset relabel_with(const Dataset& d, std::span<const double> original_labels)
{
    Dataset out = d;
    out.original_labels.assign(original_labels.begin(), original_labels.end());
    out.class_labels.resize(original_labels.size());
    std::iota(out.class_labels.begin(), out.class_labels.end(), 0);
    if (!d.labeled()) {
        out.class_labels.clear();
        out.original_labels.clear();
        return out;
    }
    for (auto& s : out.series) {
        const double raw = d.original_labels.at(static_cast<std::size_t>(s.label));
        auto it = std::find(original_labels.begin(), original_labels.end(), raw);
        if (it == original_labels.end()) {
            throw Error(ErrorKind::UnknownLabel, "label " + format_label(raw) + " was not seen in training");
        }
        s.label = static_cast<int>(it - original_labels.begin());
    }
    return out;
}

Dataset z_normalize(Dataset d)
{
    for (auto& s : d.series) {
        const double n = static_cast<double>(s.values.size());
        const double mean = std::accumulate(s.values.begin(), s.values.end(), 0.0) / n;
        double ss = 0.0;
        for (double v : s.values) {
            ss += (v - mean) * (v - mean);
        }
        const double sd = std::sqrt(ss / n);
        for (double& v : s.values) {
            v = sd > 0.0 ? (v - mean) / sd : 0.0;
        }
    }
    return d;
}

void validate_dataset(const Dataset& d, std::size_t min_classes)
{
    if (d.series.empty()) {
        throw Error(ErrorKind::EmptyFile, "dataset '" + d.name + "' is empty");
    }
    const std::size_t len = d.length();
    if (len < 2) {
        throw Error(ErrorKind::SeriesTooShort, "series length " + std::to_string(len) + " < 2");
    }
    for (const auto& s : d.series) {
        if (s.values.size() != len) {
            throw Error(ErrorKind::RaggedRows, "dataset '" + d.name + "' has unequal series lengths");
        }
        for (double v : s.values) {
            if (!std::isfinite(v)) {
                throw Error(ErrorKind::NonFiniteValue, "dataset '" + d.name + "' contains a non-finite value");
            }
        }
    }
    if (d.n_classes() < min_classes) {
        throw Error(ErrorKind::SingleClass, "dataset '" + d.name + "' needs at least " + std::to_string(min_classes) + " classes");
    }
    for (const auto& s : d.series) {
        if (d.labeled() && (s.label < 0 || static_cast<std::size_t>(s.label) >= d.n_classes())) {
            throw Error(ErrorKind::UnknownLabel, "label index out of range in '" + d.name + "'");
        }
    }
}

FoldPlan stratified_kfold(const Dataset& d, int k, std::uint64_t seed)
{
    if (k < 2) {
        throw Error(ErrorKind::InvalidConfig, "k-fold needs k >= 2, got " + std::to_string(k));
    }
    const auto folds = static_cast<std::size_t>(k);
    if (d.size() < folds) {
        throw Error(ErrorKind::TooFewInstances,
            std::to_string(d.size()) + " instances cannot fill " + std::to_string(k) + " folds");
    }
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < d.size(); ++i) {
        by_class[d.series[i].label].push_back(i);
    }

    FoldPlan plan;
    plan.seed = seed;
    plan.folds.resize(folds);
    Rng rng(seed);
    std::size_t dealt = 0;
    for (auto& [label, members] : by_class) {
        rng.shuffle(std::span<std::size_t>(members));
        if (members.size() < folds) {
            plan.shortfall_classes.push_back(label);
        }
        for (std::size_t idx : members) {
            plan.folds[dealt % folds].validation.push_back(idx);
            ++dealt;
        }
    }
    for (auto& fold : plan.folds) {
        std::sort(fold.validation.begin(), fold.validation.end());
        std::vector<bool> held(d.size(), false);
        for (std::size_t idx : fold.validation) {
            held[idx] = true;
        }
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (!held[i]) {
                fold.train.push_back(i);
            }
        }
    }
    return plan;
}

} // namespace tsgp
