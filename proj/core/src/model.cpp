#include "prnuda/model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "prnuda/rng.hpp"

namespace prnuda {
namespace {

std::size_t shape_count(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int d : shape) n *= static_cast<std::size_t>(d);
    return n;
}

struct LayoutBuilder {
    std::vector<LayoutEntry> entries;
    std::size_t total = 0;

    void add(const std::string& name, std::vector<int> shape) {
        LayoutEntry e;
        e.name = name;
        e.shape = std::move(shape);
        e.offset = total;
        e.count = shape_count(e.shape);
        total += e.count;
        entries.push_back(std::move(e));
    }
    void conv(const std::string& name, int co, int ci, int k) {
        add(name + ".w", {co, ci, k, k});
        add(name + ".b", {co});
    }
};

void kaiming_init(ModelState& m, std::uint64_t seed) {
    Rng rng(Rng::mix(seed, 0x6d6f64656cULL));
    for (const auto& e : m.layout) {
        if (e.shape.size() == 4) {  // conv weight (co, ci, kh, kw)
            int fan_in = e.shape[1] * e.shape[2] * e.shape[3];
            double bound = std::sqrt(6.0 / fan_in);
            for (std::size_t i = 0; i < e.count; ++i)
                m.params[e.offset + i] = rng.uniform(-bound, bound);
        }
        // biases stay zero
    }
}

}  // namespace

std::string ArchDescriptor::describe() const {
    std::ostringstream os;
    os << "in=" << in_channels << " k=" << num_classes << " enc=" << enc_w1 << "/"
       << enc_w2 << "/" << enc_w3 << " prn=" << prn_width;
    return os.str();
}

const LayoutEntry& ModelState::entry(const std::string& name) const {
    for (const auto& e : layout)
        if (e.name == name) return e;
    throw std::invalid_argument("ModelState: no layout entry named " + name);
}

ModelState make_model(const ArchDescriptor& arch, ModelKind kind, std::uint64_t seed) {
    ModelState m;
    m.arch = arch;
    m.kind = kind;
    LayoutBuilder lb;
    if (kind == ModelKind::Segmenter) {
        lb.conv("enc.conv1", arch.enc_w1, arch.in_channels, 3);
        lb.conv("enc.conv2", arch.enc_w2, arch.enc_w1, 3);
        lb.conv("enc.conv3", arch.enc_w3, arch.enc_w2, 3);
        lb.conv("dec.head", arch.num_classes, arch.enc_w3, 1);
    } else {
        lb.conv("prn.conv1", arch.prn_width, arch.feature_channels() + arch.num_classes, 3);
        lb.conv("prn.conv2", arch.prn_width, arch.prn_width, 3);
        lb.conv("prn.seg", arch.num_classes, arch.prn_width, 1);
        lb.conv("prn.noise", 1, arch.prn_width, 1);
    }
    m.layout = std::move(lb.entries);
    m.params.assign(lb.total, 0.0);
    kaiming_init(m, seed);
    return m;
}

std::vector<ParamGroup> param_groups(const ModelState& m) {
    std::vector<ParamGroup> groups;
    if (m.kind == ModelKind::PrnDecoder) {
        groups.push_back({"decoder", 0, m.params.size()});
        return groups;
    }
    // layout is built enc.* first, dec.* after; groups are contiguous
    std::size_t enc_end = 0;
    for (const auto& e : m.layout)
        if (e.name.rfind("enc.", 0) == 0) enc_end = e.offset + e.count;
    groups.push_back({"encoder", 0, enc_end});
    groups.push_back({"decoder", enc_end, m.params.size() - enc_end});
    return groups;
}

}  // namespace prnuda
