#include "vrin/checkpoint.hpp"

#include <bit>
#include <cstring>

#include "vrin/errors.hpp"
#include "vrin/io.hpp"

namespace vrin {

namespace {

constexpr char kMagic[4] = {'V', 'R', 'I', 'N'};
constexpr const char* kStatsMean = "stats.mean";
constexpr const char* kStatsStd = "stats.std";

template <class T>
void put(std::string& out, T v) {
    static_assert(std::is_integral_v<T>);
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_double(std::string& out, double v) { put(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
public:
    explicit Reader(std::string_view bytes) : bytes_(bytes) {}

    template <class T>
    T get() {
        need(sizeof(T));
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            v |= static_cast<T>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        }
        pos_ += sizeof(T);
        return v;
    }

    double get_double() { return std::bit_cast<double>(get<std::uint64_t>()); }

    std::string_view take(std::size_t n) {
        need(n);
        auto s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    bool done() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) throw DataError("checkpoint truncated");
    }

    std::string_view bytes_;
    std::size_t pos_ = 0;
};

struct Entry {
    std::string name;
    Shape shape;
    std::uint64_t offset;
};

}  // namespace

std::string encode_checkpoint(const Model& model) {
    std::vector<Entry> entries;
    std::vector<const std::vector<double>*> data;
    std::uint64_t offset = 0;
    auto add = [&](const std::string& name, const Shape& shape, const std::vector<double>& values) {
        entries.push_back({name, shape, offset});
        data.push_back(&values);
        offset += values.size();
    };
    for (std::size_t i = 0; i < model.params.size(); ++i) {
        const Tensor& t = model.params.value(i);
        add(model.params.name(i), t.shape(), t.storage());
    }
    add(kStatsMean, {model.stats.mean.size()}, model.stats.mean);
    add(kStatsStd, {model.stats.stddev.size()}, model.stats.stddev);

    std::string out(kMagic, 4);
    put<std::uint32_t>(out, kCheckpointVersion);
    const std::string config = to_text(model.config);
    put<std::uint64_t>(out, config.size());
    out += config;
    put<std::uint32_t>(out, static_cast<std::uint32_t>(entries.size()));
    for (const auto& e : entries) {
        put<std::uint32_t>(out, static_cast<std::uint32_t>(e.name.size()));
        out += e.name;
        put<std::uint32_t>(out, static_cast<std::uint32_t>(e.shape.size()));
        for (auto d : e.shape) put<std::uint64_t>(out, d);
        put<std::uint64_t>(out, e.offset);
    }
    put<std::uint64_t>(out, offset);
    for (const auto* values : data) {
        for (double v : *values) put_double(out, v);
    }
    return out;
}

Model decode_checkpoint(std::string_view bytes) {
    Reader in(bytes);
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw DataError("not a checkpoint file");
    in.take(4);
    const auto version = in.get<std::uint32_t>();
    if (version != kCheckpointVersion) {
        throw DataError("checkpoint version " + std::to_string(version) + " is not supported (expected " +
                        std::to_string(kCheckpointVersion) + ")");
    }
    Model model;
    const auto config_len = in.get<std::uint64_t>();
    model.config = parse_config(in.take(config_len));

    const auto count = in.get<std::uint32_t>();
    std::vector<Entry> entries(count);
    for (auto& e : entries) {
        e.name = std::string(in.take(in.get<std::uint32_t>()));
        const auto rank = in.get<std::uint32_t>();
        if (rank == 0 || rank > 8) throw DataError("checkpoint entry '" + e.name + "' has invalid rank");
        for (std::uint32_t r = 0; r < rank; ++r) e.shape.push_back(in.get<std::uint64_t>());
        e.offset = in.get<std::uint64_t>();
    }
    const auto payload = in.get<std::uint64_t>();

    // Entries must tile the payload in order, without gaps or overlap.
    std::uint64_t expected = 0;
    for (const auto& e : entries) {
        if (e.offset != expected) throw DataError("checkpoint entry '" + e.name + "' has a bad offset");
        expected += shape_size(e.shape);
        if (expected > payload) throw DataError("checkpoint entry '" + e.name + "' runs past the payload");
    }
    if (expected != payload) throw DataError("checkpoint payload size does not match its manifest");

    for (const auto& e : entries) {
        std::vector<double> values(shape_size(e.shape));
        for (auto& v : values) v = in.get_double();
        if (e.name == kStatsMean) {
            model.stats.mean = std::move(values);
        } else if (e.name == kStatsStd) {
            model.stats.stddev = std::move(values);
        } else {
            model.params.add(e.name, Tensor(e.shape, std::move(values)));
        }
    }
    if (!in.done()) throw DataError("checkpoint has trailing bytes");
    return model;
}

void save_checkpoint(const std::filesystem::path& file, const Model& model) {
    io::write_text(file, encode_checkpoint(model));
}

Model load_checkpoint(const std::filesystem::path& file) { return decode_checkpoint(io::read_text(file)); }

}  // namespace vrin
