#include "hypertrust/data_io.hpp"

#include "hypertrust/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace hypertrust {

namespace {

constexpr char kCheckpointMagic[8] = {'H', 'T', 'R', 'U', 'S', 'T', 'C', 'K'};
constexpr std::uint32_t kCheckpointVersion = 1;

[[noreturn]] void fail_at(const fs::path& file, std::size_t line, const std::string& what) {
    throw std::runtime_error(file.filename().string() + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string strip(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

long parse_long(const std::string& s, const fs::path& file, std::size_t line) {
    try {
        std::size_t used = 0;
        const long v = std::stol(strip(s), &used);
        if (used != strip(s).size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        fail_at(file, line, "malformed integer '" + s + "'");
    }
}

double parse_double(const std::string& s, const fs::path& file, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(strip(s), &used);
        if (used != strip(s).size()) throw std::invalid_argument("trailing junk");
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite");
        return v;
    } catch (const std::exception&) {
        fail_at(file, line, "malformed real '" + s + "'");
    }
}

// Reads all data lines (header skipped, blank lines ignored) and the header.
std::vector<std::pair<std::size_t, std::string>> read_csv_lines(const fs::path& file,
                                                                const std::string& expected_header) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::pair<std::size_t, std::string>> rows;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (strip(line).empty()) continue;
        if (!saw_header) {
            if (strip(line) != expected_header) {
                fail_at(file, lineno, "expected header '" + expected_header + "', got '" + line + "'");
            }
            saw_header = true;
            continue;
        }
        rows.emplace_back(lineno, line);
    }
    if (!saw_header) fail_at(file, 1, "missing header '" + expected_header + "'");
    return rows;
}

DeviceId parse_device_id(const std::string& s, Index n, const fs::path& file, std::size_t line) {
    const long v = parse_long(s, file, line);
    if (v < 0 || v >= n) fail_at(file, line, "unknown device id " + std::to_string(v));
    return static_cast<DeviceId>(v);
}

void append_le_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void append_le_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void append_le_double(std::string& out, double v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof(bits));
    append_le_u64(out, bits);
}

class BinaryReader {
public:
    BinaryReader(std::string data, fs::path file) : data_(std::move(data)), file_(std::move(file)) {}

    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(byte()) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(byte()) << (8 * i);
        return v;
    }
    double f64() {
        const std::uint64_t bits = u64();
        double v = 0.0;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }
    void raw(char* out, std::size_t count) {
        if (pos_ + count > data_.size()) throw std::runtime_error(file_.string() + ": truncated checkpoint");
        std::memcpy(out, data_.data() + pos_, count);
        pos_ += count;
    }
    bool exhausted() const { return pos_ == data_.size(); }

private:
    unsigned char byte() {
        if (pos_ >= data_.size()) throw std::runtime_error(file_.string() + ": truncated checkpoint");
        return static_cast<unsigned char>(data_[pos_++]);
    }
    std::string data_;
    fs::path file_;
    std::size_t pos_ = 0;
};

std::string read_whole_file(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file_atomic(const fs::path& file, const std::string& content) {
    fs::path dir = file.parent_path();
    if (dir.empty()) dir = ".";
    fs::create_directories(dir);
    const fs::path tmp = dir / (file.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    fs::rename(tmp, file);
}

std::uint64_t fnv1a_hash(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t hash_file(const fs::path& file) {
    return fnv1a_hash(read_whole_file(file));
}

// --- dataset ----------------------------------------------------------------

Dataset load_dataset(const fs::path& dir) {
    for (const char* name : {"nodes.csv", "links.csv", "friendships.csv", "interests.csv", "collaborations.csv"}) {
        if (!fs::exists(dir / name)) {
            throw std::runtime_error("dataset directory " + dir.string() + " is missing " + name);
        }
    }

    Dataset ds;

    const auto node_rows = read_csv_lines(dir / "nodes.csv", "id,x,y,device_type");
    ds.devices.resize(node_rows.size());
    std::set<long> seen_ids;
    const Index n = static_cast<Index>(node_rows.size());
    for (const auto& [lineno, row] : node_rows) {
        const auto f = split(row, ',');
        if (f.size() != 4) fail_at(dir / "nodes.csv", lineno, "expected 4 fields");
        const long id = parse_long(f[0], dir / "nodes.csv", lineno);
        if (id < 0 || id >= n) fail_at(dir / "nodes.csv", lineno, "ids must be dense 0..n-1; got " + f[0]);
        if (!seen_ids.insert(id).second) fail_at(dir / "nodes.csv", lineno, "duplicate id " + f[0]);
        DeviceRecord rec;
        rec.id = static_cast<DeviceId>(id);
        rec.x = parse_double(f[1], dir / "nodes.csv", lineno);
        rec.y = parse_double(f[2], dir / "nodes.csv", lineno);
        rec.device_type = strip(f[3]);
        if (rec.x < 0.0 || rec.x > 1.0 || rec.y < 0.0 || rec.y > 1.0) {
            fail_at(dir / "nodes.csv", lineno, "position outside [0,1]^2");
        }
        if (rec.device_type.empty()) fail_at(dir / "nodes.csv", lineno, "empty device_type");
        ds.devices[static_cast<std::size_t>(id)] = rec;
    }

    auto load_pairs = [&](const char* name, std::vector<std::pair<DeviceId, DeviceId>>& out) {
        for (const auto& [lineno, row] : read_csv_lines(dir / name, "src,dst")) {
            const auto f = split(row, ',');
            if (f.size() != 2) fail_at(dir / name, lineno, "expected 2 fields");
            const DeviceId a = parse_device_id(f[0], n, dir / name, lineno);
            const DeviceId b = parse_device_id(f[1], n, dir / name, lineno);
            if (a == b) fail_at(dir / name, lineno, "self-loop on device " + f[0]);
            out.emplace_back(a, b);
        }
    };
    load_pairs("links.csv", ds.links);
    load_pairs("friendships.csv", ds.friendships);

    ds.interests.resize(static_cast<std::size_t>(n));
    for (const auto& [lineno, row] : read_csv_lines(dir / "interests.csv", "node_id,interest_id")) {
        const auto f = split(row, ',');
        if (f.size() != 2) fail_at(dir / "interests.csv", lineno, "expected 2 fields");
        const DeviceId a = parse_device_id(f[0], n, dir / "interests.csv", lineno);
        const long b = parse_long(f[1], dir / "interests.csv", lineno);
        if (b < 0) fail_at(dir / "interests.csv", lineno, "negative interest id");
        ds.interests[static_cast<std::size_t>(a)].insert(static_cast<int>(b));
    }

    for (const auto& [lineno, row] : read_csv_lines(dir / "collaborations.csv", "task_id,members,success")) {
        const auto f = split(row, ',');
        if (f.size() != 3) fail_at(dir / "collaborations.csv", lineno, "expected 3 fields");
        CollaborationRecord rec;
        for (const std::string& m : split(f[1], ';')) {
            rec.members.push_back(parse_device_id(m, n, dir / "collaborations.csv", lineno));
        }
        if (rec.members.size() < 2) {
            fail_at(dir / "collaborations.csv", lineno, "collaboration needs at least 2 members");
        }
        const long s = parse_long(f[2], dir / "collaborations.csv", lineno);
        if (s != 0 && s != 1) fail_at(dir / "collaborations.csv", lineno, "success must be 0 or 1");
        rec.success = (s == 1);
        ds.collaborations.push_back(std::move(rec));
    }

    ds.validate();
    return ds;
}

void save_dataset(const Dataset& dataset, const fs::path& dir) {
    dataset.validate();
    fs::create_directories(dir);

    std::ostringstream nodes;
    nodes << "id,x,y,device_type\n";
    for (const auto& d : dataset.devices) {
        nodes << d.id << ',' << format_double(d.x) << ',' << format_double(d.y) << ',' << d.device_type << '\n';
    }
    write_file_atomic(dir / "nodes.csv", nodes.str());

    auto write_pairs = [&](const char* name, const std::vector<std::pair<DeviceId, DeviceId>>& pairs) {
        std::ostringstream out;
        out << "src,dst\n";
        for (const auto& [a, b] : pairs) out << a << ',' << b << '\n';
        write_file_atomic(dir / name, out.str());
    };
    write_pairs("links.csv", dataset.links);
    write_pairs("friendships.csv", dataset.friendships);

    std::ostringstream interests;
    interests << "node_id,interest_id\n";
    for (std::size_t i = 0; i < dataset.interests.size(); ++i) {
        for (int b : dataset.interests[i]) interests << i << ',' << b << '\n';
    }
    write_file_atomic(dir / "interests.csv", interests.str());

    std::ostringstream collabs;
    collabs << "task_id,members,success\n";
    for (std::size_t t = 0; t < dataset.collaborations.size(); ++t) {
        const auto& rec = dataset.collaborations[t];
        collabs << t << ',';
        for (std::size_t i = 0; i < rec.members.size(); ++i) {
            if (i) collabs << ';';
            collabs << rec.members[i];
        }
        collabs << ',' << (rec.success ? 1 : 0) << '\n';
    }
    write_file_atomic(dir / "collaborations.csv", collabs.str());
}

Dataset generate_synthetic(Index n, std::uint64_t seed, const SynthKnobs& knobs) {
    if (n < 2) throw std::invalid_argument("generate_synthetic: n must be >= 2");
    if (!(knobs.link_prob >= 0.0 && knobs.link_prob <= 1.0) ||
        !(knobs.friend_prob >= 0.0 && knobs.friend_prob <= 1.0) ||
        !(knobs.collab_success_rate >= 0.0 && knobs.collab_success_rate <= 1.0)) {
        throw std::invalid_argument("generate_synthetic: probabilities must be in [0, 1]");
    }
    if (knobs.n_interests < 0 || knobs.interests_per_device < 0 || knobs.n_collabs < 0 || knobs.n_types < 1) {
        throw std::invalid_argument("generate_synthetic: negative knob");
    }

    Dataset ds;
    Rng pos_rng = derive_stream(seed, 1);
    Rng type_rng = derive_stream(seed, 2);
    Rng link_rng = derive_stream(seed, 3);
    Rng friend_rng = derive_stream(seed, 4);
    Rng interest_rng = derive_stream(seed, 5);
    Rng collab_rng = derive_stream(seed, 6);

    ds.devices.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        auto& d = ds.devices[static_cast<std::size_t>(i)];
        d.id = static_cast<DeviceId>(i);
        d.x = pos_rng.next_double();
        d.y = pos_rng.next_double();
        d.device_type = "type" + std::to_string(type_rng.next_below(static_cast<std::uint64_t>(knobs.n_types)));
    }

    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            if (link_rng.next_bernoulli(knobs.link_prob)) {
                ds.links.emplace_back(static_cast<DeviceId>(i), static_cast<DeviceId>(j));
            }
        }
    }
    std::vector<std::set<DeviceId>> friends(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            if (friend_rng.next_bernoulli(knobs.friend_prob)) {
                ds.friendships.emplace_back(static_cast<DeviceId>(i), static_cast<DeviceId>(j));
                friends[static_cast<std::size_t>(i)].insert(static_cast<DeviceId>(j));
                friends[static_cast<std::size_t>(j)].insert(static_cast<DeviceId>(i));
            }
        }
    }

    ds.interests.resize(static_cast<std::size_t>(n));
    const int per_device = std::min(knobs.interests_per_device, knobs.n_interests);
    for (Index i = 0; i < n; ++i) {
        auto& mine = ds.interests[static_cast<std::size_t>(i)];
        while (static_cast<int>(mine.size()) < per_device) {
            mine.insert(static_cast<int>(interest_rng.next_below(static_cast<std::uint64_t>(knobs.n_interests))));
        }
    }

    for (int t = 0; t < knobs.n_collabs; ++t) {
        const int size = 2 + static_cast<int>(collab_rng.next_below(3)); // 2..4 members
        std::set<DeviceId> members;
        members.insert(static_cast<DeviceId>(collab_rng.next_below(static_cast<std::uint64_t>(n))));
        while (static_cast<int>(members.size()) < size) {
            // weighted toward friends of current members
            std::vector<DeviceId> candidates;
            for (DeviceId m : members) {
                for (DeviceId f : friends[static_cast<std::size_t>(m)]) {
                    if (!members.count(f)) candidates.push_back(f);
                }
            }
            if (!candidates.empty() && collab_rng.next_bernoulli(0.7)) {
                members.insert(candidates[collab_rng.next_below(candidates.size())]);
            } else {
                members.insert(static_cast<DeviceId>(collab_rng.next_below(static_cast<std::uint64_t>(n))));
            }
        }
        CollaborationRecord rec;
        rec.members.assign(members.begin(), members.end());
        rec.success = collab_rng.next_bernoulli(knobs.collab_success_rate);
        ds.collaborations.push_back(std::move(rec));
    }

    ds.validate();
    return ds;
}

// --- hypergraph file --------------------------------------------------------

void save_hypergraph(const Hypergraph& g, const fs::path& file) {
    std::ostringstream out;
    out << "num_devices," << g.num_devices() << '\n';
    out << "kind,weight,members\n";
    for (const auto& e : g.hyperedges()) {
        out << to_string(e.kind) << ',' << format_double(e.weight) << ',';
        for (std::size_t i = 0; i < e.members.size(); ++i) {
            if (i) out << ';';
            out << e.members[i];
        }
        out << '\n';
    }
    write_file_atomic(file, out.str());
}

Hypergraph load_hypergraph(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(in, line)) fail_at(file, 1, "empty hypergraph file");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto head = split(line, ',');
    if (head.size() != 2 || head[0] != "num_devices") fail_at(file, lineno, "expected num_devices,<n>");
    const long n = parse_long(head[1], file, lineno);

    if (!std::getline(in, line)) fail_at(file, 2, "missing header");
    ++lineno;

    Hypergraph g(static_cast<Index>(n));
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (strip(line).empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 3) fail_at(file, lineno, "expected 3 fields");
        const RelationKind kind = relation_kind_from_string(strip(f[0]));
        const double weight = parse_double(f[1], file, lineno);
        std::vector<DeviceId> members;
        for (const std::string& m : split(f[2], ';')) {
            members.push_back(static_cast<DeviceId>(parse_long(m, file, lineno)));
        }
        g.add_hyperedge(members, weight, kind);
    }
    return g;
}

// --- checkpoint --------------------------------------------------------------

void save_checkpoint(const HgnnParams& params, std::uint64_t hash, const fs::path& file) {
    std::string out;
    out.append(kCheckpointMagic, sizeof(kCheckpointMagic));
    append_le_u32(out, kCheckpointVersion);
    append_le_u64(out, hash);
    const std::vector<Matrix> flat = params.flatten();
    append_le_u32(out, static_cast<std::uint32_t>(flat.size()));
    for (const auto& m : flat) {
        append_le_u32(out, static_cast<std::uint32_t>(m.rows()));
        append_le_u32(out, static_cast<std::uint32_t>(m.cols()));
    }
    for (const auto& m : flat) {
        for (Index i = 0; i < m.rows(); ++i) {
            for (Index j = 0; j < m.cols(); ++j) append_le_double(out, m(i, j));
        }
    }
    write_file_atomic(file, out);
}

Checkpoint load_checkpoint(const fs::path& file) {
    BinaryReader in(read_whole_file(file), file);
    char magic[8];
    in.raw(magic, sizeof(magic));
    if (std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
        throw std::runtime_error(file.string() + ": not a checkpoint file");
    }
    const std::uint32_t version = in.u32();
    if (version != kCheckpointVersion) {
        throw std::runtime_error(file.string() + ": unsupported checkpoint version " + std::to_string(version));
    }
    Checkpoint ckpt;
    ckpt.config_hash = in.u64();
    const std::uint32_t count = in.u32();
    if (count == 0 || count % 2 != 0) {
        throw std::runtime_error(file.string() + ": invalid matrix count " + std::to_string(count));
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> shapes(count);
    for (auto& [r, c] : shapes) {
        r = in.u32();
        c = in.u32();
    }
    std::vector<Matrix> flat;
    flat.reserve(count);
    for (const auto& [r, c] : shapes) {
        Matrix m(static_cast<Index>(r), static_cast<Index>(c));
        for (Index i = 0; i < m.rows(); ++i) {
            for (Index j = 0; j < m.cols(); ++j) {
                const double v = in.f64();
                if (!std::isfinite(v)) throw std::runtime_error(file.string() + ": non-finite parameter value");
                m(i, j) = v;
            }
        }
        flat.push_back(std::move(m));
    }
    if (!in.exhausted()) throw std::runtime_error(file.string() + ": trailing bytes in checkpoint");
    ckpt.params = HgnnParams::unflatten(flat);
    return ckpt;
}

// --- train config -------------------------------------------------------------

TrainConfig config_from_string(const std::string& text) {
    TrainConfig config;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = strip(line);
        if (s.empty() || s[0] == '#') continue;
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key=value");
        }
        const std::string key = strip(s.substr(0, eq));
        const std::string value = strip(s.substr(eq + 1));
        try {
            if (key == "epochs") config.epochs = std::stoi(value);
            else if (key == "lr") config.lr = std::stod(value);
            else if (key == "p_a") config.p_a = std::stod(value);
            else if (key == "p_h") config.p_h = std::stod(value);
            else if (key == "lambda_dev") config.weights.lambda_dev = std::stod(value);
            else if (key == "lambda_hyp") config.weights.lambda_hyp = std::stod(value);
            else if (key == "lambda1") config.weights.lambda1 = std::stod(value);
            else if (key == "lambda2") config.weights.lambda2 = std::stod(value);
            else if (key == "layers") config.layers = std::stoi(value);
            else if (key == "embedding_dim") config.embedding_dim = std::stol(value);
            else if (key == "seed") config.seed = std::stoull(value);
            else if (key == "weight_decay") config.weight_decay = std::stod(value);
            else if (key == "activation") {
                if (value == "relu") config.activation = Activation::ReLU;
                else if (value == "identity") config.activation = Activation::Identity;
                else throw std::runtime_error("unknown activation '" + value + "'");
            } else {
                throw std::runtime_error("unknown config key '" + key + "'");
            }
        } catch (const std::runtime_error&) {
            throw;
        } catch (const std::exception&) {
            throw std::runtime_error("config line " + std::to_string(lineno) + ": malformed value for " + key);
        }
    }
    return config;
}

TrainConfig config_from_file(const fs::path& file) {
    return config_from_string(read_whole_file(file));
}

std::string config_to_string(const TrainConfig& config) {
    std::ostringstream out;
    out << "epochs=" << config.epochs << '\n'
        << "lr=" << format_double(config.lr) << '\n'
        << "p_a=" << format_double(config.p_a) << '\n'
        << "p_h=" << format_double(config.p_h) << '\n'
        << "lambda_dev=" << format_double(config.weights.lambda_dev) << '\n'
        << "lambda_hyp=" << format_double(config.weights.lambda_hyp) << '\n'
        << "lambda1=" << format_double(config.weights.lambda1) << '\n'
        << "lambda2=" << format_double(config.weights.lambda2) << '\n'
        << "layers=" << config.layers << '\n'
        << "embedding_dim=" << config.embedding_dim << '\n'
        << "seed=" << config.seed << '\n'
        << "weight_decay=" << format_double(config.weight_decay) << '\n'
        << "activation=" << (config.activation == Activation::ReLU ? "relu" : "identity") << '\n';
    return out.str();
}

std::uint64_t config_hash(const TrainConfig& config) {
    return fnv1a_hash(config_to_string(config));
}

// --- exports -------------------------------------------------------------------

void save_embeddings_csv(const Matrix& embeddings, const fs::path& file) {
    std::ostringstream out;
    out << "device_id";
    for (Index j = 0; j < embeddings.cols(); ++j) out << ",e" << j;
    out << '\n';
    for (Index i = 0; i < embeddings.rows(); ++i) {
        out << i;
        for (Index j = 0; j < embeddings.cols(); ++j) out << ',' << format_double(embeddings(i, j));
        out << '\n';
    }
    write_file_atomic(file, out.str());
}

Matrix load_embeddings_csv(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(file.string() + ": empty embeddings file");
    const std::size_t cols = split(line, ',').size() - 1;
    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (strip(line).empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != cols + 1) fail_at(file, lineno, "wrong field count");
        std::vector<double> row;
        for (std::size_t j = 1; j < f.size(); ++j) row.push_back(parse_double(f[j], file, lineno));
        rows.push_back(std::move(row));
    }
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols; ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
    return m;
}

void save_loss_history_csv(const std::vector<LossBreakdown>& history, const fs::path& file) {
    std::ostringstream out;
    out << "epoch,inv_dev,dec_dev,inv_hyp,dec_hyp,reg,total\n";
    for (std::size_t e = 0; e < history.size(); ++e) {
        const auto& h = history[e];
        out << e << ',' << format_double(h.inv_dev) << ',' << format_double(h.dec_dev) << ','
            << format_double(h.inv_hyp) << ',' << format_double(h.dec_hyp) << ','
            << format_double(h.reg) << ',' << format_double(h.total) << '\n';
    }
    write_file_atomic(file, out.str());
}

namespace {
std::size_t ranking_cutoff(const TrustRanking& ranking, int top_k) {
    return top_k < 0 ? ranking.entries.size()
                     : std::min(ranking.entries.size(), static_cast<std::size_t>(top_k));
}
} // namespace

void save_ranking_csv(const TrustRanking& ranking, const fs::path& file, int top_k) {
    std::ostringstream out;
    out << "initiator,rank,device_id,trust\n";
    const std::size_t limit = ranking_cutoff(ranking, top_k);
    for (std::size_t i = 0; i < limit; ++i) {
        out << ranking.initiator << ',' << (i + 1) << ',' << ranking.entries[i].first << ','
            << format_double(ranking.entries[i].second) << '\n';
    }
    write_file_atomic(file, out.str());
}

void save_ranking_json(const TrustRanking& ranking, const TrainConfig& config, const fs::path& file,
                       int top_k) {
    nlohmann::json j;
    j["initiator"] = ranking.initiator;
    j["config"] = nlohmann::json::parse(R"({})");
    {
        nlohmann::json c;
        c["epochs"] = config.epochs;
        c["lr"] = config.lr;
        c["p_a"] = config.p_a;
        c["p_h"] = config.p_h;
        c["lambda_dev"] = config.weights.lambda_dev;
        c["lambda_hyp"] = config.weights.lambda_hyp;
        c["lambda1"] = config.weights.lambda1;
        c["lambda2"] = config.weights.lambda2;
        c["layers"] = config.layers;
        c["embedding_dim"] = config.embedding_dim;
        c["seed"] = config.seed;
        c["weight_decay"] = config.weight_decay;
        c["activation"] = config.activation == Activation::ReLU ? "relu" : "identity";
        j["config"] = c;
    }
    j["entries"] = nlohmann::json::array();
    const std::size_t limit = ranking_cutoff(ranking, top_k);
    for (std::size_t i = 0; i < limit; ++i) {
        j["entries"].push_back({{"rank", i + 1},
                                {"device_id", ranking.entries[i].first},
                                {"trust", ranking.entries[i].second}});
    }
    write_file_atomic(file, j.dump(2) + "\n");
}

void save_heatmap_csv(const SensitivityGrid& grid, const fs::path& file) {
    std::ostringstream out;
    out << "p_a,p_h,ss\n";
    for (Index r = 0; r < grid.ss.rows(); ++r) {
        for (Index c = 0; c < grid.ss.cols(); ++c) {
            out << format_double(grid.p_a_values[static_cast<std::size_t>(r)]) << ','
                << format_double(grid.p_h_values[static_cast<std::size_t>(c)]) << ',';
            const double v = grid.ss(r, c);
            if (std::isnan(v)) out << "nan";
            else out << format_double(v);
            out << '\n';
        }
    }
    write_file_atomic(file, out.str());
}

void save_histogram_csv(const TrustHistogram& hist, const fs::path& file) {
    std::ostringstream out;
    out << "bin_lo,bin_hi,proportion\n";
    for (std::size_t b = 0; b < hist.proportion.size(); ++b) {
        out << format_double(hist.bin_lo[b]) << ',' << format_double(hist.bin_hi[b]) << ','
            << format_double(hist.proportion[b]) << '\n';
    }
    write_file_atomic(file, out.str());
}

void save_scaling_csv(const std::vector<ScalingRow>& rows, const fs::path& file) {
    std::ostringstream out;
    out << "size,selected_id,trust\n";
    for (const auto& row : rows) {
        out << row.size << ',' << row.selected << ',' << format_double(row.trust_value) << '\n';
    }
    write_file_atomic(file, out.str());
}

void save_projection_csv(const Matrix& projected, const std::vector<std::string>& group_labels,
                         const fs::path& file) {
    if (projected.cols() != 2 || static_cast<std::size_t>(projected.rows()) != group_labels.size()) {
        throw std::invalid_argument("save_projection_csv: expected n x 2 matrix and one label per row");
    }
    std::ostringstream out;
    out << "device_id,x,y,group\n";
    for (Index i = 0; i < projected.rows(); ++i) {
        out << i << ',' << format_double(projected(i, 0)) << ',' << format_double(projected(i, 1)) << ','
            << group_labels[static_cast<std::size_t>(i)] << '\n';
    }
    write_file_atomic(file, out.str());
}

void save_run_metadata(const TrainConfig& config, const fs::path& file) {
    write_file_atomic(file, config_to_string(config));
}

} // namespace hypertrust
