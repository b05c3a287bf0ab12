#include "structlearn/model.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string_view>

#include "structlearn/error.hpp"

namespace structlearn {

namespace {

constexpr std::string_view kMagic = "STRUCTSL";

enum class Section : std::uint32_t { task = 1, meta = 2, features = 3, labels = 4, weights = 5 };

class Writer {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int k = 0; k < 4; ++k) out_.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
    }
    void u64(std::uint64_t v) {
        for (int k = 0; k < 8; ++k) out_.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void str(std::string_view s) {
        u64(s.size());
        out_.insert(out_.end(), s.begin(), s.end());
    }
    void raw(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }
    void section(Section tag, const Writer& body) {
        u32(static_cast<std::uint32_t>(tag));
        u64(body.out_.size());
        out_.insert(out_.end(), body.out_.begin(), body.out_.end());
    }
    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    Reader(const std::uint8_t* data, std::size_t size, std::size_t base)
        : data_(data), size_(size), base_(base) {}

    std::size_t offset() const noexcept { return base_ + pos_; }
    bool done() const noexcept { return pos_ == size_; }

    void need(std::size_t n) const {
        if (size_ - pos_ < n) throw ParseError::at_byte("truncated model file", offset());
    }
    std::uint8_t u8() {
        need(1);
        return data_[pos_++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int k = 0; k < 4; ++k) v |= std::uint32_t{data_[pos_ + k]} << (8 * k);
        pos_ += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int k = 0; k < 8; ++k) v |= std::uint64_t{data_[pos_ + k]} << (8 * k);
        pos_ += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        const std::uint64_t n = u64();
        need(n);
        std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
        pos_ += n;
        return s;
    }
    Reader sub(std::uint64_t n) {
        need(n);
        Reader r(data_ + pos_, n, offset());
        pos_ += n;
        return r;
    }

private:
    const std::uint8_t* data_;
    std::size_t size_;
    std::size_t base_;
    std::size_t pos_ = 0;
};

Writer encode_lexicon(const Lexicon& lex) {
    Writer w;
    const auto names = lex.names();
    w.u64(names.size());
    for (const auto& n : names) w.str(n);
    return w;
}

Lexicon decode_lexicon(Reader& r) {
    const std::size_t at = r.offset();
    const std::uint64_t count = r.u64();
    std::vector<std::string> names;
    for (std::uint64_t k = 0; k < count; ++k) names.push_back(r.str());
    try {
        Lexicon lex(names);
        lex.freeze();
        return lex;
    } catch (const ContractError& e) {
        throw ParseError::at_byte(e.what(), at);
    }
}

}  // namespace

bool operator==(const ModelArtifact& a, const ModelArtifact& b) {
    return a.task == b.task && a.format_version == b.format_version && a.trainer_meta == b.trainer_meta &&
           a.feature_lexicon.names() == b.feature_lexicon.names() &&
           a.label_lexicon.names() == b.label_lexicon.names() &&
           std::equal(a.weights.values().begin(), a.weights.values().end(), b.weights.values().begin(),
                      b.weights.values().end(), [](double x, double y) {
                          return std::bit_cast<std::uint64_t>(x) == std::bit_cast<std::uint64_t>(y);
                      });
}

std::vector<std::uint8_t> encode_model(const ModelArtifact& model) {
    if (model.weights.dimension() != model.feature_lexicon.size())
        throw ContractError("model weight dimension does not match feature lexicon size");

    Writer out;
    out.raw(kMagic);
    out.u32(model.format_version);

    Writer task;
    task.u8(static_cast<std::uint8_t>(model.task));
    out.section(Section::task, task);

    Writer meta;
    meta.u64(model.trainer_meta.size());
    for (const auto& [k, v] : model.trainer_meta) {
        meta.str(k);
        meta.str(v);
    }
    out.section(Section::meta, meta);

    out.section(Section::features, encode_lexicon(model.feature_lexicon));
    out.section(Section::labels, encode_lexicon(model.label_lexicon));

    Writer weights;
    weights.u64(model.weights.dimension());
    for (double v : model.weights.values()) weights.f64(v);
    out.section(Section::weights, weights);
    return out.take();
}

ModelArtifact decode_model(const std::vector<std::uint8_t>& bytes) {
    Reader r(bytes.data(), bytes.size(), 0);
    r.need(kMagic.size());
    for (char c : kMagic) {
        if (r.u8() != static_cast<std::uint8_t>(c)) throw ParseError::at_byte("bad magic string", 0);
    }
    ModelArtifact m;
    m.format_version = r.u32();
    if (m.format_version != kModelFormatVersion)
        throw VersionError("unsupported model version " + std::to_string(m.format_version));

    unsigned seen = 0;
    while (!r.done()) {
        const std::size_t section_at = r.offset();
        const auto tag = r.u32();
        const auto length = r.u64();
        Reader body = r.sub(length);
        if (tag < 1 || tag > 5) throw ParseError::at_byte("unknown section tag " + std::to_string(tag), section_at);
        if (seen & (1u << tag)) throw ParseError::at_byte("duplicate section", section_at);
        seen |= 1u << tag;

        switch (static_cast<Section>(tag)) {
        case Section::task: {
            const auto t = body.u8();
            if (t < 1 || t > 3) throw ParseError::at_byte("unknown task tag", section_at);
            m.task = static_cast<TaskKind>(t);
            break;
        }
        case Section::meta: {
            const auto count = body.u64();
            for (std::uint64_t k = 0; k < count; ++k) {
                auto key = body.str();
                m.trainer_meta[std::move(key)] = body.str();
            }
            break;
        }
        case Section::features: m.feature_lexicon = decode_lexicon(body); break;
        case Section::labels: m.label_lexicon = decode_lexicon(body); break;
        case Section::weights: {
            const auto dim = body.u64();
            if (dim > length / 8) throw ParseError::at_byte("truncated model file", body.offset());
            std::vector<double> w(dim);
            for (auto& v : w) v = body.f64();
            try {
                m.weights = WeightVector(std::move(w));
            } catch (const ContractError& e) {
                throw ParseError::at_byte(e.what(), section_at);
            }
            m.weights.freeze();
            break;
        }
        }
        if (!body.done()) throw ParseError::at_byte("section has trailing bytes", body.offset());
    }
    if (seen != 0b111110) throw ParseError::at_byte("model file is missing sections", r.offset());
    if (m.weights.dimension() != m.feature_lexicon.size())
        throw ParseError::at_byte("weight dimension does not match feature lexicon", r.offset());
    return m;
}

void save_model(const ModelArtifact& model, const std::filesystem::path& path) {
    const auto bytes = encode_model(model);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("failed writing " + path.string());
}

ModelArtifact load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model file " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_model(bytes);
}

}  // namespace structlearn
