#include "mjkd/dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace mjkd {

void LabeledDataset::validate() const {
    if (features.rows == 0) throw std::invalid_argument("dataset: no rows");
    if (features.cols == 0) throw std::invalid_argument("dataset: zero feature dimension");
    if (class_count < 1) throw std::invalid_argument("dataset: class_count must be positive");
    if (labels.size() != features.rows || domain.size() != features.rows)
        throw std::invalid_argument("dataset: column sizes disagree with feature rows");
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < -1 || labels[i] >= class_count)
            throw std::invalid_argument("dataset: label out of range at row " + std::to_string(i));
    }
    for (double v : features.data) {
        if (!std::isfinite(v)) throw std::invalid_argument("dataset: non-finite feature value");
    }
}

void ShiftSpec::validate() const {
    if (class_count < 2) throw std::invalid_argument("shift spec: class_count must be at least 2");
    if (source_per_class < 1 || target_per_class < 1)
        throw std::invalid_argument("shift spec: samples per class must be positive");
    if (!(center_radius > 0.0)) throw std::invalid_argument("shift spec: center_radius must be positive");
    if (!(class_std > 0.0)) throw std::invalid_argument("shift spec: class_std must be positive");
    if (dim < 2) throw std::invalid_argument("shift spec: dim must be at least 2");
    if (!std::isfinite(rotation_deg) || !std::isfinite(translation[0]) || !std::isfinite(translation[1]))
        throw std::invalid_argument("shift spec: non-finite shift parameters");
}

namespace {

// Draws the c-gon mixture; rows are class-major.
LabeledDataset draw_clusters(const ShiftSpec& spec, int per_class, Domain tag, Rng& rng) {
    const int c = spec.class_count;
    const int d = spec.dim;
    LabeledDataset ds;
    ds.class_count = c;
    ds.features = Matrix(static_cast<std::size_t>(c) * per_class, d);
    ds.labels.reserve(ds.features.rows);
    ds.domain.assign(ds.features.rows, tag);

    std::size_t row = 0;
    for (int m = 0; m < c; ++m) {
        double angle = 2.0 * M_PI * m / c;
        double cx = spec.center_radius * std::cos(angle);
        double cy = spec.center_radius * std::sin(angle);
        for (int i = 0; i < per_class; ++i, ++row) {
            auto r = ds.features.row(row);
            r[0] = cx + spec.class_std * rng.normal();
            r[1] = cy + spec.class_std * rng.normal();
            for (int k = 2; k < d; ++k) r[k] = spec.class_std * rng.normal();
            ds.labels.push_back(m);
        }
    }
    return ds;
}

}  // namespace

DomainPair generate_pair(const ShiftSpec& spec) {
    spec.validate();

    Rng source_rng(derive_seed(spec.seed, "source-draw"));
    Rng target_rng(derive_seed(spec.seed, "target-draw"));

    DomainPair pair;
    pair.source = draw_clusters(spec, spec.source_per_class, Domain::source, source_rng);
    pair.target = draw_clusters(spec, spec.target_per_class, Domain::target, target_rng);

    // Domain shift: rotate and translate the target copy in the plane.
    double theta = spec.rotation_deg * M_PI / 180.0;
    double ct = std::cos(theta), st = std::sin(theta);
    for (std::size_t i = 0; i < pair.target.size(); ++i) {
        auto r = pair.target.features.row(i);
        double x = r[0], y = r[1];
        r[0] = ct * x - st * y + spec.translation[0];
        r[1] = st * x + ct * y + spec.translation[1];
    }

    pair.target_truth = std::move(pair.target.labels);
    pair.target.labels.assign(pair.target.size(), -1);

    pair.source.validate();
    pair.target.validate();
    return pair;
}

void save_dataset(const LabeledDataset& ds, const std::filesystem::path& path) {
    ds.validate();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << "# classes=" << ds.class_count << "\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        out << ds.labels[i] << ',' << (ds.domain[i] == Domain::source ? 's' : 't');
        auto r = ds.features.row(i);
        for (double v : r) out << ',' << format_double(v);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

namespace {

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line_no, const std::string& msg) {
    throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + msg);
}

std::vector<std::string_view> split_commas(std::string_view line, std::vector<std::string_view>& out) {
    out.clear();
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

}  // namespace

LabeledDataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());

    LabeledDataset ds;
    int declared_classes = -1;
    std::vector<int> labels;
    std::vector<Domain> domains;
    std::vector<double> values;
    std::vector<std::size_t> row_lines;
    std::size_t cols = 0;

    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string_view> fields;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto pos = line.find("classes=");
            if (pos != std::string::npos) {
                try {
                    declared_classes = static_cast<int>(parse_int(std::string_view(line).substr(pos + 8)));
                } catch (const std::exception&) {
                    parse_fail(path, line_no, "malformed classes header");
                }
            }
            continue;
        }
        split_commas(line, fields);
        if (fields.size() < 3) parse_fail(path, line_no, "malformed row, expected label,domain,features");
        int label = 0;
        try {
            label = static_cast<int>(parse_int(fields[0]));
        } catch (const std::exception&) {
            parse_fail(path, line_no, "malformed label '" + std::string(fields[0]) + "'");
        }
        Domain dom;
        if (fields[1] == "s") dom = Domain::source;
        else if (fields[1] == "t") dom = Domain::target;
        else parse_fail(path, line_no, "unknown domain tag '" + std::string(fields[1]) + "'");

        std::size_t row_cols = fields.size() - 2;
        if (cols == 0) cols = row_cols;
        else if (row_cols != cols)
            parse_fail(path, line_no, "inconsistent column count (" + std::to_string(row_cols) +
                                          " features, expected " + std::to_string(cols) + ")");

        for (std::size_t k = 2; k < fields.size(); ++k) {
            try {
                values.push_back(parse_double(fields[k]));
            } catch (const std::exception&) {
                parse_fail(path, line_no, "malformed feature value '" + std::string(fields[k]) + "'");
            }
        }
        labels.push_back(label);
        domains.push_back(dom);
        row_lines.push_back(line_no);
    }

    if (labels.empty()) throw std::runtime_error(path.string() + ": no rows");

    int max_label = -1;
    for (int l : labels) max_label = std::max(max_label, l);
    if (declared_classes >= 0) {
        ds.class_count = declared_classes;
        if (max_label >= declared_classes) {
            for (std::size_t i = 0; i < labels.size(); ++i) {
                if (labels[i] >= declared_classes)
                    parse_fail(path, row_lines[i], "label " + std::to_string(labels[i]) +
                                                       " out of range for " + std::to_string(declared_classes) + " classes");
            }
        }
    } else {
        if (max_label < 0)
            throw std::runtime_error(path.string() + ": cannot infer class count from an unlabeled file");
        ds.class_count = max_label + 1;
    }

    ds.features.rows = labels.size();
    ds.features.cols = cols;
    ds.features.data = std::move(values);
    ds.labels = std::move(labels);
    ds.domain = std::move(domains);
    ds.validate();
    return ds;
}

}  // namespace mjkd
