#include <json.hpp>
#include <stdexcept>

#include "gtfdi/classifiers.hpp"
#include "gtfdi/util.hpp"

namespace gtfdi {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

json norm_to_json(const NormStats& st) {
    json j;
    for (int f = 0; f < kNumSignals; ++f)
        j[signal_names()[f]] = {
            {"mean", st.mean[f]}, {"std", st.stddev[f]}, {"retained", st.retained[f]}};
    return j;
}

NormStats norm_from_json(const json& j) {
    NormStats st;
    for (int f = 0; f < kNumSignals; ++f) {
        const auto& e = j.at(signal_names()[f]);
        st.mean[f] = e.at("mean").get<double>();
        st.stddev[f] = e.at("std").get<double>();
        st.retained[f] = e.at("retained").get<bool>();
    }
    return st;
}

json vec12_to_json(const std::array<double, kNumSignals>& v) {
    return json(std::vector<double>(v.begin(), v.end()));
}

std::array<double, kNumSignals> vec12_from_json(const json& j) {
    const auto v = j.get<std::vector<double>>();
    if (v.size() != kNumSignals)
        throw std::runtime_error("model payload: vector length mismatch");
    std::array<double, kNumSignals> a{};
    std::copy(v.begin(), v.end(), a.begin());
    return a;
}

json payload_to_json(const TrainedModel& m) {
    json j;
    switch (m.algo) {
        case Algo::LDA: {
            const auto& p = std::get<LdaPayload>(m.payload);
            json means = json::array();
            for (const auto& mu : p.means) means.push_back(vec12_to_json(mu));
            json cov = json::array();
            for (const auto& row : p.cov_inv) cov.push_back(vec12_to_json(row));
            j = {{"means", means}, {"cov_inv", cov}, {"log_priors", p.log_priors}};
            break;
        }
        case Algo::SVM: {
            const auto& p = std::get<SvmPayload>(m.payload);
            json w = json::array();
            for (const auto& wc : p.weights) w.push_back(vec12_to_json(wc));
            j = {{"weights", w}, {"bias", p.bias}};
            break;
        }
        case Algo::KNN: {
            const auto& p = std::get<KnnPayload>(m.payload);
            json pts = json::array();
            for (const auto& x : p.points) pts.push_back(vec12_to_json(x));
            j = {{"points", pts}, {"labels", p.labels}, {"k", p.k}};
            break;
        }
        case Algo::Tree: {
            const auto& p = std::get<TreePayload>(m.payload);
            json nodes = json::array();
            for (const auto& n : p.nodes)
                nodes.push_back({{"feature", n.feature},
                                 {"threshold", n.threshold},
                                 {"left", n.left},
                                 {"right", n.right},
                                 {"leaf_label", n.leaf_label}});
            j = {{"nodes", nodes}};
            break;
        }
    }
    return j;
}

void payload_from_json(TrainedModel& m, const json& j) {
    switch (m.algo) {
        case Algo::LDA: {
            LdaPayload p;
            for (const auto& mu : j.at("means")) p.means.push_back(vec12_from_json(mu));
            const auto& cov = j.at("cov_inv");
            if (cov.size() != kNumSignals)
                throw std::runtime_error("model payload: covariance dimension mismatch");
            for (int a = 0; a < kNumSignals; ++a) p.cov_inv[a] = vec12_from_json(cov[a]);
            p.log_priors = j.at("log_priors").get<std::vector<double>>();
            if (p.means.size() != m.class_names.size() ||
                p.log_priors.size() != m.class_names.size())
                throw std::runtime_error("model payload: class dimension mismatch");
            m.payload = std::move(p);
            break;
        }
        case Algo::SVM: {
            SvmPayload p;
            for (const auto& w : j.at("weights")) p.weights.push_back(vec12_from_json(w));
            p.bias = j.at("bias").get<std::vector<double>>();
            if (p.weights.size() != m.class_names.size() ||
                p.bias.size() != m.class_names.size())
                throw std::runtime_error("model payload: class dimension mismatch");
            m.payload = std::move(p);
            break;
        }
        case Algo::KNN: {
            KnnPayload p;
            for (const auto& x : j.at("points")) p.points.push_back(vec12_from_json(x));
            p.labels = j.at("labels").get<std::vector<int>>();
            p.k = j.at("k").get<int>();
            if (p.labels.size() != p.points.size() || p.k < 1 ||
                static_cast<std::size_t>(p.k) > p.points.size())
                throw std::runtime_error("model payload: stored neighbor set inconsistent");
            m.payload = std::move(p);
            break;
        }
        case Algo::Tree: {
            TreePayload p;
            for (const auto& n : j.at("nodes")) {
                TreeNode node;
                node.feature = n.at("feature").get<int>();
                node.threshold = n.at("threshold").get<double>();
                node.left = n.at("left").get<int>();
                node.right = n.at("right").get<int>();
                node.leaf_label = n.at("leaf_label").get<int>();
                const int sz = static_cast<int>(j.at("nodes").size());
                if (node.feature >= kNumSignals || node.left >= sz || node.right >= sz)
                    throw std::runtime_error("model payload: malformed tree node");
                p.nodes.push_back(node);
            }
            if (p.nodes.empty()) throw std::runtime_error("model payload: empty tree");
            m.payload = std::move(p);
            break;
        }
    }
}

}  // namespace

std::string model_to_json(const TrainedModel& m) {
    json j;
    j["format"] = "gtfdi-model";
    j["format_version"] = kFormatVersion;
    j["algorithm"] = algo_name(m.algo);
    j["class_names"] = m.class_names;
    j["norm_stats"] = norm_to_json(m.norm);
    j["training_time_s"] = m.training_time_s;
    j["dataset_checksum"] = to_hex(m.dataset_checksum);
    const json payload = payload_to_json(m);
    j["payload"] = payload;
    j["payload_checksum"] = to_hex(fnv1a64(payload.dump()));
    return j.dump(1) + "\n";
}

TrainedModel model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("model load: corrupt file: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != "gtfdi-model")
            throw std::runtime_error("model load: not a model file");
        if (j.at("format_version").get<int>() != kFormatVersion)
            throw std::runtime_error("model load: unsupported format version " +
                                     j.at("format_version").dump());
        TrainedModel m;
        m.algo = algo_from_name(j.at("algorithm").get<std::string>());
        m.class_names = j.at("class_names").get<std::vector<std::string>>();
        if (m.class_names.size() < 2) throw std::runtime_error("model load: missing classes");
        m.norm = norm_from_json(j.at("norm_stats"));
        m.training_time_s = j.at("training_time_s").get<double>();
        m.dataset_checksum = std::stoull(j.at("dataset_checksum").get<std::string>(), nullptr, 16);

        const std::string expected = j.at("payload_checksum").get<std::string>();
        const std::string actual = to_hex(fnv1a64(j.at("payload").dump()));
        if (expected != actual)
            throw std::runtime_error("model load: payload checksum mismatch");
        payload_from_json(m, j.at("payload"));
        return m;
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("model load: malformed document: ") + e.what());
    }
}

void save_model(const TrainedModel& m, const std::string& path) {
    write_file(path, model_to_json(m));
}

TrainedModel load_model(const std::string& path) {
    try {
        return model_from_json(read_file(path));
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(std::string(e.what()) + " (" + path + ")");
    }
}

}  // namespace gtfdi
