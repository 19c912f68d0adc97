#include "refine_search/analysis/diversity.hpp"

#include "refine_search/gateway/http_backend.hpp"

#include <fmt/format.h>
#include <httplib.h>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace refine_search::analysis {

namespace {

double norm(const Vector& v) {
    double s = 0.0;
    for (const double x : v) s += x * x;
    return std::sqrt(s);
}

double cosine(const Vector& u, double nu, const Vector& v, double nv) {
    double dot = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
    return std::clamp(dot / (nu * nv), -1.0, 1.0);
}

}  // namespace

DiversityMatrix diversity_matrix(const std::vector<std::vector<Vector>>& groups, std::vector<std::string> labels) {
    if (groups.empty()) throw Error("diversity matrix needs at least one group");
    if (labels.empty()) {
        for (std::size_t i = 0; i < groups.size(); ++i) labels.push_back(std::to_string(i + 1));
    }
    if (labels.size() != groups.size()) throw Error("one label per group required");
    std::optional<std::size_t> dim;
    std::vector<std::vector<double>> norms(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (groups[g].empty()) throw Error(fmt::format("group {} has no vectors", labels[g]));
        for (const auto& v : groups[g]) {
            if (v.empty()) throw Error("empty embedding vector");
            if (dim && *dim != v.size()) throw Error(fmt::format("dimension mismatch: {} vs {}", *dim, v.size()));
            dim = v.size();
            const double n = norm(v);
            if (n == 0.0 || !std::isfinite(n)) throw Error(fmt::format("zero or non-finite vector in group {}", labels[g]));
            norms[g].push_back(n);
        }
    }
    DiversityMatrix m;
    m.labels = std::move(labels);
    const auto n = groups.size();
    m.values.assign(n, std::vector<double>(n, 0.0));
    m.singleton.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double sum = 0.0;
            std::size_t pairs = 0;
            for (std::size_t a = 0; a < groups[i].size(); ++a) {
                for (std::size_t b = 0; b < groups[j].size(); ++b) {
                    if (i == j && a == b) continue;
                    sum += cosine(groups[i][a], norms[i][a], groups[j][b], norms[j][b]);
                    ++pairs;
                }
            }
            double value = 1.0;
            if (pairs == 0) {
                m.singleton[i] = true;
            } else {
                value = sum / static_cast<double>(pairs);
            }
            m.values[i][j] = value;
            m.values[j][i] = value;
        }
    }
    return m;
}

std::string text_hash(std::string_view text) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 computation failed");
    }
    std::string hex;
    hex.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

DirectionGroups group_directions(const std::vector<SearchTrace>& traces) {
    DirectionGroups g;
    const auto put = [](std::vector<std::vector<std::string>>& groups, std::size_t index, const std::string& text) {
        if (groups.size() <= index) groups.resize(index + 1);
        groups[index].push_back(text);
    };
    for (const auto& t : traces) {
        std::map<int, std::size_t> root_ordinal;  // node id of an initial code -> 0-based position
        std::size_t step = 0;
        for (const auto& n : t.nodes) {
            if (!n.parent) {
                const auto ordinal = root_ordinal.size();
                root_ordinal[n.node_id] = ordinal;
                continue;
            }
            if (!n.direction_used) continue;
            int root = n.node_id;
            while (const auto& p = t.node(root).parent) root = *p;
            put(g.by_step, step++, n.direction_used->text);
            put(g.by_initial_code, root_ordinal.at(root), n.direction_used->text);
        }
    }
    return g;
}

EmbeddingFile::EmbeddingFile(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(fmt::format("cannot read embeddings file {}", path.string()));
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto doc = nlohmann::json::parse(line);
            table_[doc.at("text_hash").get<std::string>()] = doc.at("vector").get<Vector>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
        }
    }
}

namespace {

[[noreturn]] void throw_missing(const std::vector<std::string>& missing) {
    std::string list;
    for (const auto& m : missing) list += fmt::format("\n  {}", m);
    throw Error(fmt::format("missing embeddings for {} direction(s):{}", missing.size(), list));
}

}  // namespace

std::vector<Vector> EmbeddingFile::embed(const std::vector<std::string>& texts) {
    std::vector<Vector> out;
    std::vector<std::string> missing;
    for (const auto& t : texts) {
        const auto it = table_.find(text_hash(t));
        if (it == table_.end()) {
            missing.push_back(t);
        } else {
            out.push_back(it->second);
        }
    }
    if (!missing.empty()) throw_missing(missing);
    return out;
}

EmbeddingEndpoint::EmbeddingEndpoint(std::string base_url, std::string model, std::string api_key)
    : model_(std::move(model)), api_key_(std::move(api_key)) {
    std::tie(origin_, prefix_) = gateway::split_base_url(base_url);
}

std::vector<Vector> EmbeddingEndpoint::embed(const std::vector<std::string>& texts) {
    if (texts.empty()) return {};
    httplib::Client client(origin_);
    client.set_read_timeout(std::chrono::seconds(120));
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    const nlohmann::json body{{"model", model_}, {"input", texts}};
    const auto res = client.Post(prefix_ + "/embeddings", headers, body.dump(), "application/json");
    if (!res) throw Error(fmt::format("embeddings request failed: {}", httplib::to_string(res.error())));
    if (res->status != 200) throw Error(fmt::format("embeddings endpoint returned HTTP {}", res->status));
    std::vector<Vector> out(texts.size());
    std::vector<bool> seen(texts.size(), false);
    try {
        const auto doc = nlohmann::json::parse(res->body);
        const auto& data = doc.at("data");
        for (std::size_t i = 0; i < data.size(); ++i) {
            const auto index = data[i].value("index", i);
            if (index >= texts.size()) throw Error("embedding index out of range");
            out[index] = data[i].at("embedding").get<Vector>();
            seen[index] = true;
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(fmt::format("malformed embeddings response: {}", e.what()));
    }
    std::vector<std::string> missing;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        if (!seen[i]) missing.push_back(texts[i]);
    }
    if (!missing.empty()) throw_missing(missing);
    return out;
}

EmbeddedGroups embed_directions(const std::vector<SearchTrace>& traces, EmbeddingSource& source) {
    const auto groups = group_directions(traces);
    std::set<std::string> distinct;
    for (const auto& g : groups.by_step) distinct.insert(g.begin(), g.end());
    const std::vector<std::string> texts(distinct.begin(), distinct.end());
    const auto vectors = source.embed(texts);
    if (vectors.size() != texts.size()) throw Error("embedding source returned the wrong number of vectors");
    std::map<std::string, Vector> by_text;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        auto v = vectors[i];
        const double n = norm(v);
        if (n == 0.0 || !std::isfinite(n)) throw Error(fmt::format("zero embedding for direction: {}", texts[i]));
        for (auto& x : v) x /= n;
        by_text[texts[i]] = std::move(v);
    }
    const auto map_groups = [&](const std::vector<std::vector<std::string>>& in) {
        std::vector<std::vector<Vector>> out;
        for (const auto& g : in) {
            auto& dst = out.emplace_back();
            for (const auto& t : g) dst.push_back(by_text.at(t));
        }
        return out;
    };
    return {map_groups(groups.by_step), map_groups(groups.by_initial_code)};
}

std::string matrix_csv(const DiversityMatrix& m, std::string_view grouping) {
    std::string out = fmt::format("# mean cosine similarity; rows and columns: {}\n", grouping);
    out += "group";
    for (const auto& l : m.labels) out += "," + l;
    out += "\n";
    for (std::size_t i = 0; i < m.values.size(); ++i) {
        out += m.labels[i];
        for (const double v : m.values[i]) out += fmt::format(",{:.6f}", v);
        out += "\n";
    }
    return out;
}

std::string matrix_svg(const DiversityMatrix& m, std::string_view title) {
    constexpr int kCell = 48;
    constexpr int kMargin = 56;
    const int n = static_cast<int>(m.values.size());
    const int size = kMargin + n * kCell + 16;
    double lo = 1.0;
    double hi = -1.0;
    for (const auto& row : m.values) {
        for (const double v : row) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    const double span = hi > lo ? hi - lo : 1.0;
    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" font-family=\"sans-serif\" "
        "font-size=\"11\">\n<text x=\"{2}\" y=\"18\" font-size=\"13\">{3}</text>\n",
        size, size + 8, kMargin, title);
    for (int i = 0; i < n; ++i) {
        out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", kMargin - 6,
                           kMargin + i * kCell + kCell / 2 + 4, m.labels[static_cast<std::size_t>(i)]);
        out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", kMargin + i * kCell + kCell / 2,
                           kMargin - 6, m.labels[static_cast<std::size_t>(i)]);
        for (int j = 0; j < n; ++j) {
            const double v = m.values[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            const double t = (v - lo) / span;
            // light yellow (low) to dark red (high)
            const int r = static_cast<int>(255 - 88 * t);
            const int g = static_cast<int>(247 - 247 * t);
            const int b = static_cast<int>(188 - 150 * t);
            out += fmt::format(
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"rgb({},{},{})\"/>\n"
                "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" fill=\"{}\">{:.2f}</text>\n",
                kMargin + j * kCell, kMargin + i * kCell, kCell, kCell, r, g, b, kMargin + j * kCell + kCell / 2,
                kMargin + i * kCell + kCell / 2 + 4, t > 0.6 ? "white" : "black", v);
        }
    }
    return out + "</svg>\n";
}

nlohmann::json to_json(const DiversityMatrix& m, std::string_view grouping) {
    return {{"grouping", grouping}, {"labels", m.labels}, {"values", m.values}, {"singleton", m.singleton}};
}

}  // namespace refine_search::analysis
