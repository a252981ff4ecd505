#include "latalign/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace latalign {

namespace fs = std::filesystem;

namespace {

template <class U>
void put_le(std::string& out, U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

template <class U>
U get_le(const unsigned char* p) {
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(p[i]) << (8 * i);
    return v;
}

void put_values(std::string& out, const ParamStore& store) {
    for (std::size_t g = 0; g < store.group_count(); ++g)
        for (double v : store.group(g).data) put_le(out, std::bit_cast<std::uint64_t>(v));
}

class Reader {
public:
    Reader(std::string bytes, std::string source) : bytes_(std::move(bytes)), source_(std::move(source)) {}

    const unsigned char* take(std::size_t n) {
        if (bytes_.size() - pos_ < n) throw DataError(source_ + ": checkpoint is truncated");
        const auto* p = reinterpret_cast<const unsigned char*>(bytes_.data() + pos_);
        pos_ += n;
        return p;
    }
    std::uint32_t u32() { return get_le<std::uint32_t>(take(4)); }
    std::uint64_t u64() { return get_le<std::uint64_t>(take(8)); }
    double f64() { return std::bit_cast<double>(u64()); }
    bool done() const { return pos_ == bytes_.size(); }

private:
    std::string bytes_;
    std::string source_;
    std::size_t pos_ = 0;
};

struct Parsed {
    nlohmann::json header;
    Reader reader;
};

Parsed open_checkpoint(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    Reader r(ss.str(), path.string());
    if (std::memcmp(r.take(sizeof(kCheckpointMagic)), kCheckpointMagic, sizeof(kCheckpointMagic)) != 0)
        throw DataError(path.string() + ": not a checkpoint file");
    const std::uint32_t version = r.u32();
    if (version != kCheckpointFormatVersion)
        throw DataError(path.string() + ": unsupported checkpoint format version " + std::to_string(version));
    const std::uint64_t header_len = r.u64();
    const auto* h = r.take(header_len);
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(reinterpret_cast<const char*>(h), reinterpret_cast<const char*>(h) + header_len);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path.string() + ": corrupt checkpoint header: " + e.what());
    }
    return {std::move(header), std::move(r)};
}

ParamStore read_values(Reader& r, const ParamStore& layout) {
    ParamStore out = zeros_like(layout);
    for (std::size_t g = 0; g < out.group_count(); ++g)
        for (double& v : out.group(g).data) v = r.f64();
    return out;
}

}  // namespace

void save_checkpoint(const ModelState& state, const fs::path& path) {
    nlohmann::json groups = nlohmann::json::array();
    for (std::size_t g = 0; g < state.params.group_count(); ++g) {
        const auto& t = state.params.group(g);
        groups.push_back({{"name", state.params.name(g)}, {"rows", t.rows}, {"cols", t.cols}});
    }
    const nlohmann::json header{
        {"format_version", kCheckpointFormatVersion},
        {"config", state.config.to_json()},
        {"baseline_stats", state.baseline_stats.to_json()},
        {"dims",
         {{"items_r", state.dims.vae_r.input_width},
          {"items_s", state.dims.vae_s.input_width},
          {"baseline_width", state.dims.baseline_width},
          {"latent_dim", state.dims.latent_dim},
          {"homogeneous", state.dims.homogeneous}}},
        {"run_seed", state.run_seed},
        {"epoch", state.epoch},
        {"adam_step", state.adam.step},
        {"groups", groups},
        {"sections", {"params", "adam_first_moment", "adam_second_moment"}},
    };
    const std::string text = header.dump();

    std::string out(kCheckpointMagic, sizeof(kCheckpointMagic));
    put_le(out, kCheckpointFormatVersion);
    put_le(out, static_cast<std::uint64_t>(text.size()));
    out += text;
    put_values(out, state.params);
    put_values(out, state.adam.first_moment);
    put_values(out, state.adam.second_moment);
    write_text_atomic(path, out);
}

nlohmann::json read_checkpoint_header(const fs::path& path) { return open_checkpoint(path).header; }

ModelState load_checkpoint(const fs::path& path) {
    Parsed p = open_checkpoint(path);
    const auto& h = p.header;
    ModelState m;
    try {
        m.config = TrainConfig::from_json(h.at("config"));
        m.baseline_stats = BaselineStats::from_json(h.at("baseline_stats"));
        const auto& dims = h.at("dims");
        m.dims.latent_dim = dims.at("latent_dim").get<std::size_t>();
        m.dims.homogeneous = dims.at("homogeneous").get<bool>();
        m.dims.baseline_width = dims.at("baseline_width").get<std::size_t>();
        m.dims.vae_r = {dims.at("items_r").get<std::size_t>(), m.dims.latent_dim};
        m.dims.vae_s = {dims.at("items_s").get<std::size_t>(), m.dims.latent_dim};
        m.run_seed = h.at("run_seed").get<std::uint64_t>();
        m.epoch = h.at("epoch").get<std::size_t>();
        for (const auto& g : h.at("groups")) {
            m.params.add(g.at("name").get<std::string>(),
                         Tensor<double>(g.at("rows").get<std::size_t>(), g.at("cols").get<std::size_t>()));
        }
        m.adam = AdamState(m.params, m.config.adam);
        m.adam.step = h.at("adam_step").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path.string() + ": incomplete checkpoint header: " + e.what());
    } catch (const ConfigError& e) {
        throw DataError(path.string() + ": invalid checkpoint configuration: " + e.what());
    }
    if (m.baseline_stats.width() != m.dims.baseline_width)
        throw DataError(path.string() + ": baseline statistics do not match the stored network width");

    m.params = read_values(p.reader, m.params);
    m.adam.first_moment = read_values(p.reader, m.params);
    m.adam.second_moment = read_values(p.reader, m.params);
    if (!p.reader.done()) throw DataError(path.string() + ": trailing bytes after checkpoint data");

    ParamStore expected;
    std::mt19937_64 rng(0);
    init_vae(expected, kVaeR, m.dims.vae_r, rng);
    init_vae(expected, kVaeS, m.dims.vae_s, rng);
    init_dynamics_net(expected, m.dims.baseline_width, m.dims.latent_dim, m.dims.homogeneous, rng);
    if (!same_layout(expected, m.params)) throw DataError(path.string() + ": parameter groups do not match the model");
    return m;
}

}  // namespace latalign
