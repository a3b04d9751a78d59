#include "prnuda/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace prnuda {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint payload is little-endian");

using json = nlohmann::json;

json arch_to_json(const ArchDescriptor& a) {
    return {{"in_channels", a.in_channels}, {"num_classes", a.num_classes},
            {"enc_w1", a.enc_w1},           {"enc_w2", a.enc_w2},
            {"enc_w3", a.enc_w3},           {"prn_width", a.prn_width}};
}

ArchDescriptor arch_from_json(const json& j) {
    ArchDescriptor a;
    a.in_channels = j.at("in_channels");
    a.num_classes = j.at("num_classes");
    a.enc_w1 = j.at("enc_w1");
    a.enc_w2 = j.at("enc_w2");
    a.enc_w3 = j.at("enc_w3");
    a.prn_width = j.at("prn_width");
    return a;
}

json layout_to_json(const std::vector<LayoutEntry>& layout) {
    json arr = json::array();
    for (const auto& e : layout) arr.push_back({{"name", e.name}, {"shape", e.shape}});
    return arr;
}

void write_f32(std::ofstream& out, const std::vector<double>& v) {
    std::vector<float> buf(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) buf[i] = static_cast<float>(v[i]);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
}

std::vector<double> read_f32(std::ifstream& in, std::size_t count) {
    std::vector<float> buf(count);
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(count * sizeof(float)));
    if (!in) throw std::runtime_error("checkpoint: truncated payload");
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = buf[i];
    return out;
}

}  // namespace

void save_checkpoint(const std::string& path, const TrainCheckpoint& ckpt) {
    json header;
    header["version"] = kCheckpointTag;
    header["step"] = ckpt.step;
    header["ema_beta"] = ckpt.ema_beta;
    header["arch"] = arch_to_json(ckpt.student.arch);
    header["student_layout"] = layout_to_json(ckpt.student.layout);
    header["prn_layout"] = layout_to_json(ckpt.prn.layout);
    header["sections"] = json::array();
    auto add_section = [&](const char* name, std::size_t count) {
        header["sections"].push_back({{"name", name}, {"dtype", "f32"}, {"count", count}});
    };
    add_section("student.params", ckpt.student.params.size());
    add_section("teacher.params", ckpt.teacher.params.size());
    add_section("prn.params", ckpt.prn.params.size());
    add_section("opt_student.m", ckpt.opt_student.m.size());
    add_section("opt_student.v", ckpt.opt_student.v.size());
    add_section("opt_prn.m", ckpt.opt_prn.m.size());
    add_section("opt_prn.v", ckpt.opt_prn.v.size());
    header["opt_student_step"] = ckpt.opt_student.step;
    header["opt_prn_step"] = ckpt.opt_prn.step;

    const std::string hs = header.dump();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out << kCheckpointTag << "\n";
    const std::uint32_t len = static_cast<std::uint32_t>(hs.size());
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
    write_f32(out, ckpt.student.params);
    write_f32(out, ckpt.teacher.params);
    write_f32(out, ckpt.prn.params);
    write_f32(out, ckpt.opt_student.m);
    write_f32(out, ckpt.opt_student.v);
    write_f32(out, ckpt.opt_prn.m);
    write_f32(out, ckpt.opt_prn.v);
    if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

TrainCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    std::string tag;
    std::getline(in, tag);
    if (tag != kCheckpointTag)
        throw std::runtime_error("checkpoint: bad version tag '" + tag + "'");
    std::uint32_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    std::string hs(len, '\0');
    in.read(hs.data(), len);
    if (!in) throw std::runtime_error("checkpoint: truncated header");
    const json header = json::parse(hs);

    TrainCheckpoint ckpt;
    ckpt.step = header.at("step");
    ckpt.ema_beta = header.at("ema_beta");
    const ArchDescriptor arch = arch_from_json(header.at("arch"));

    // rebuild layouts from arch; shapes in the header are advisory metadata
    ckpt.student = make_model(arch, ModelKind::Segmenter, 0);
    ckpt.teacher = make_model(arch, ModelKind::Segmenter, 0);
    ckpt.prn = make_model(arch, ModelKind::PrnDecoder, 0);

    auto expect = [&](std::size_t idx, const char* name) -> std::size_t {
        const auto& s = header.at("sections").at(idx);
        if (s.at("name") != name)
            throw std::runtime_error(std::string("checkpoint: unexpected section ") +
                                     std::string(s.at("name")));
        return s.at("count").get<std::size_t>();
    };
    ckpt.student.params = read_f32(in, expect(0, "student.params"));
    ckpt.teacher.params = read_f32(in, expect(1, "teacher.params"));
    ckpt.prn.params = read_f32(in, expect(2, "prn.params"));
    ckpt.opt_student.m = read_f32(in, expect(3, "opt_student.m"));
    ckpt.opt_student.v = read_f32(in, expect(4, "opt_student.v"));
    ckpt.opt_prn.m = read_f32(in, expect(5, "opt_prn.m"));
    ckpt.opt_prn.v = read_f32(in, expect(6, "opt_prn.v"));
    ckpt.opt_student.step = header.at("opt_student_step");
    ckpt.opt_prn.step = header.at("opt_prn_step");

    const std::size_t want_seg = make_model(arch, ModelKind::Segmenter, 0).params.size();
    const std::size_t want_prn = make_model(arch, ModelKind::PrnDecoder, 0).params.size();
    if (ckpt.student.params.size() != want_seg || ckpt.prn.params.size() != want_prn)
        throw std::runtime_error("checkpoint: payload does not match arch descriptor");
    return ckpt;
}

}  // namespace prnuda
