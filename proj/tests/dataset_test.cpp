#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qcopt/binio.hpp"
#include "qcopt/dataset.hpp"
#include "qcopt/errors.hpp"
#include "qcopt/grid_encoding.hpp"
#include "qcopt/schedule.hpp"
#include "testutil.hpp"

using namespace qcopt;
using doctest::Contains;
using testutil::kPi;
using testutil::TempDir;

namespace {

Circuit two_cz_chain() {
    Circuit c;
    c.width = 4;
    c.gates = {Gate::cz(0, 1), Gate::rx(2, 0.7), Gate::rz(3, -1.1), Gate::cz(0, 1)};
    return c;
}

std::string slurp(const std::filesystem::path& p) { return read_file(p); }

void dump(const std::filesystem::path& p, const std::string& bytes) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

// Re-frames raw payload bytes so only per-sample checks can object.
std::string reframed(const std::string& file) {
    std::string body = file.substr(0, file.size() - 4);
    uint32_t crc = crc32_of(body);
    ByteWriter w;
    w.u32(crc);
    return body + w.data();
}

}  // namespace

TEST_CASE("two-cz example labels exactly the four cz cells") {
    Circuit c = two_cz_chain();
    LabelConfig cfg;
    Rng rng(5);
    LabeledSample s = label_circuit(c, GateSet::nisq(), nullptr, cfg, rng);
    CHECK(s.qubits == 4);
    CHECK(s.slots == 2);
    CHECK(s.probes == 16);  // auto: twice the cell count
    for (int q = 0; q < 4; ++q)
        for (int t = 0; t < 2; ++t) {
            float want = q <= 1 ? 1.0f : 0.0f;
            CHECK(s.at(q, t) == want);
        }
}

TEST_CASE("irreducible circuit keeps an all-zero target") {
    Circuit c;
    c.width = 2;
    c.gates = {Gate::rx(0, 0.7), Gate::rz(1, 1.2)};
    LabelConfig cfg;
    cfg.probes = 50;
    Rng rng(1);
    LabeledSample s = label_circuit(c, GateSet::nisq(), nullptr, cfg, rng);
    CHECK(s.probes == 50);
    for (float v : s.target) CHECK(v == 0.0f);
}

TEST_CASE("labels are reproducible per seed and probe count") {
    Circuit c = random_circuit(5, 40, GateSet::nisq(), 12);
    LabelConfig cfg;
    Rng a(7), b(7), d(8);
    LabeledSample s1 = label_circuit(c, GateSet::nisq(), nullptr, cfg, a);
    LabeledSample s2 = label_circuit(c, GateSet::nisq(), nullptr, cfg, b);
    CHECK(s1 == s2);
    LabeledSample s3 = label_circuit(c, GateSet::nisq(), nullptr, cfg, d);
    CHECK(s1.target.size() == s3.target.size());
}

TEST_CASE("labeled cells are binary and sit on occupied cells only") {
    for (uint64_t seed : {3u, 4u, 5u}) {
        Circuit c = random_circuit(6, 50, GateSet::nisq(), seed);
        SlotLayout layout = schedule(c);
        LabelConfig cfg;
        Rng rng(seed);
        LabeledSample s = label_circuit(c, GateSet::nisq(), nullptr, cfg, rng);
        REQUIRE(s.qubits == layout.width);
        REQUIRE(s.slots == layout.depth);
        for (int q = 0; q < s.qubits; ++q)
            for (int t = 0; t < s.slots; ++t) {
                float v = s.at(q, t);
                CHECK((v == 0.0f || v == 1.0f));
                if (v != 0.0f) CHECK(layout.at(q, t) >= 0);
            }
    }
}

TEST_CASE("planted cz pairs are recovered") {
    int recovered = 0;
    const int kInstances = 10;
    for (int i = 0; i < kInstances; ++i) {
        Rng plant_rng(100 + i);
        Circuit c = random_circuit(6, 40, GateSet::nisq(), 200 + i);
        int a = plant_rng.uniform_int(0, c.width - 2);
        int pos = plant_rng.uniform_int(0, c.size());
        c.gates.insert(c.gates.begin() + pos, {Gate::cz(a, a + 1), Gate::cz(a, a + 1)});

        SlotLayout layout = schedule(c);
        int s1 = layout.slots[pos], s2 = layout.slots[pos + 1];
        REQUIRE(s2 == s1 + 1);

        LabelConfig cfg;
        cfg.probes = 20 * layout.width * layout.depth;
        Rng rng(300 + i);
        LabeledSample s = label_circuit(c, GateSet::nisq(), nullptr, cfg, rng);
        bool hit = s.at(a, s1) == 1.0f && s.at(a + 1, s1) == 1.0f && s.at(a, s2) == 1.0f &&
                   s.at(a + 1, s2) == 1.0f;
        recovered += hit ? 1 : 0;
    }
    CHECK(recovered >= 9);
}

TEST_CASE("most random circuits carry a nonzero target") {
    int nonzero = 0;
    const int kSamples = 20;
    for (int i = 0; i < kSamples; ++i) {
        Circuit c = random_circuit(6, 30, GateSet::nisq(), 700 + i);
        LabelConfig cfg;
        Rng rng(800 + i);
        LabeledSample s = label_circuit(c, GateSet::nisq(), nullptr, cfg, rng);
        bool any = false;
        for (float v : s.target) any = any || v != 0.0f;
        nonzero += any ? 1 : 0;
    }
    CHECK(nonzero >= 14);
}

TEST_CASE("gaussian blur bleeds onto occupied neighbors only") {
    Circuit c = two_cz_chain();
    LabelConfig cfg;
    cfg.blur_sigma = 0.8;
    Rng rng(5);
    LabeledSample s = label_circuit(c, GateSet::nisq(), nullptr, cfg, rng);
    SlotLayout layout = schedule(c);
    float top = 0;
    for (int q = 0; q < 4; ++q)
        for (int t = 0; t < 2; ++t) {
            float v = s.at(q, t);
            CHECK(v >= 0.0f);
            CHECK(v <= 1.0f);
            if (layout.at(q, t) < 0) CHECK(v == 0.0f);
            top = std::max(top, v);
        }
    CHECK(s.at(0, 0) == top);  // cz block stays the peak
    CHECK(s.at(2, 0) > 0.0f);  // rx cell catches bleed
    CHECK(s.at(2, 0) < s.at(0, 0));
}

TEST_CASE("synthesis-only reductions label once the knob is on") {
    // Conjugating RZ(0.3) by RX(pi) is one continuous-angle rotation, which
    // neither fusion nor the grid database can see.
    Circuit c;
    c.width = 1;
    c.gates = {Gate::rx(0, kPi), Gate::rz(0, 0.3), Gate::rx(0, kPi)};
    LabelConfig cfg;
    cfg.probes = 60;

    Rng off_rng(3);
    LabeledSample off = label_circuit(c, GateSet::nisq(), nullptr, cfg, off_rng);
    for (float v : off.target) CHECK(v == 0.0f);

    cfg.use_synthesis = true;
    Rng on_rng(3);
    LabeledSample on = label_circuit(c, GateSet::nisq(), nullptr, cfg, on_rng);
    CHECK(on.at(0, 0) == 1.0f);
    CHECK(on.at(0, 1) == 1.0f);
    CHECK(on.at(0, 2) == 1.0f);
}

TEST_CASE("label config and width validation") {
    LabelConfig cfg;
    cfg.blur_sigma = -0.1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    Circuit wide;
    wide.width = kQubitCap + 1;
    LabelConfig ok;
    Rng rng(1);
    CHECK_THROWS_WITH_AS(label_circuit(wide, GateSet::nisq(), nullptr, ok, rng),
                         Contains("width"), ConfigError);

    GenerateConfig gen;
    gen.chunk = 0;
    CHECK_THROWS_AS(gen.validate(), ConfigError);
    gen.chunk = 10;
    gen.count = -1;
    CHECK_THROWS_AS(gen.validate(), ConfigError);
}

TEST_CASE("empty circuit sample survives labeling and the container") {
    Circuit c;
    c.width = 3;
    LabelConfig cfg;
    Rng rng(2);
    LabeledSample s = label_circuit(c, GateSet::nisq(), nullptr, cfg, rng);
    CHECK(s.qubits == 3);
    CHECK(s.slots == 0);
    CHECK(s.target.empty());
    CHECK(s.probes == 0);

    TempDir tmp;
    Dataset ds;
    ds.gs = GateSet::nisq();
    ds.samples = {s};
    std::filesystem::path path = tmp.path / "one.qgds";
    save_dataset(ds, path);
    Dataset back = load_dataset(path);
    REQUIRE(back.samples.size() == 1);
    CHECK(back.samples[0] == s);
}

TEST_CASE("dataset container round-trips bit-for-bit") {
    TempDir tmp;
    GenerateConfig cfg;
    cfg.count = 6;
    cfg.width = 4;
    cfg.length = 12;
    cfg.seed = 42;
    Dataset ds = generate_chunk(GateSet::nisq(), nullptr, cfg, 0, cfg.count);
    REQUIRE(ds.samples.size() == 6);

    std::filesystem::path path = tmp.path / "d.qgds";
    save_dataset(ds, path);
    Dataset back = load_dataset(path);
    CHECK(back.gs.kinds == ds.gs.kinds);
    REQUIRE(back.samples.size() == ds.samples.size());
    for (size_t i = 0; i < ds.samples.size(); ++i) CHECK(back.samples[i] == ds.samples[i]);

    std::filesystem::path copy = tmp.path / "copy.qgds";
    save_dataset(back, copy);
    CHECK(slurp(path) == slurp(copy));
}

TEST_CASE("corrupted dataset bytes are rejected") {
    TempDir tmp;
    GenerateConfig cfg;
    cfg.count = 2;
    cfg.width = 3;
    cfg.length = 8;
    Dataset ds = generate_chunk(GateSet::nisq(), nullptr, cfg, 0, 2);
    std::filesystem::path path = tmp.path / "d.qgds";
    save_dataset(ds, path);
    std::string file = slurp(path);

    SUBCASE("file-level checksum") {
        std::string bad = file;
        bad[bad.size() / 2] ^= 0x20;
        dump(path, bad);
        CHECK_THROWS_WITH_AS(load_dataset(path), Contains("checksum"), IoError);
    }
    SUBCASE("per-sample checksum survives a repaired file checksum") {
        std::string bad = file;
        bad[bad.size() - 20] ^= 0x01;  // inside the last sample's target floats
        bad = reframed(bad);
        dump(path, bad);
        CHECK_THROWS_WITH_AS(load_dataset(path), Contains("sample 1"), IoError);
    }
    SUBCASE("truncation") {
        dump(path, file.substr(0, file.size() / 2));
        CHECK_THROWS_AS(load_dataset(path), IoError);
    }
}

TEST_CASE("empty dataset generates, saves, and reuses") {
    TempDir tmp;
    GenerateConfig cfg;
    cfg.count = 0;
    std::filesystem::path path = tmp.path / "empty.qgds";
    std::ostringstream log;
    Dataset ds = generate_dataset(GateSet::iontrap(), nullptr, cfg, path, &log);
    CHECK(ds.samples.empty());
    CHECK(load_dataset(path).samples.empty());
    CHECK(load_dataset(path).gs.kinds == GateSet::iontrap().kinds);

    std::ostringstream again;
    generate_dataset(GateSet::iontrap(), nullptr, cfg, path, &again);
    CHECK(again.str() == "dataset reused: " + path.string() + "\n");
}

TEST_CASE("generation is deterministic per seed") {
    TempDir tmp;
    GenerateConfig cfg;
    cfg.count = 5;
    cfg.width = 4;
    cfg.length = 10;
    cfg.chunk = 2;
    cfg.seed = 9;
    std::filesystem::path a = tmp.path / "a.qgds";
    std::filesystem::path b = tmp.path / "b.qgds";
    generate_dataset(GateSet::nisq(), nullptr, cfg, a);
    generate_dataset(GateSet::nisq(), nullptr, cfg, b);
    CHECK(slurp(a) == slurp(b));

    cfg.seed = 10;
    std::filesystem::path d = tmp.path / "d.qgds";
    generate_dataset(GateSet::nisq(), nullptr, cfg, d);
    CHECK(slurp(a) != slurp(d));
}

TEST_CASE("chunked generation resumes, rejects stale chunks, and cleans up") {
    TempDir tmp;
    GenerateConfig cfg;
    cfg.count = 5;
    cfg.width = 4;
    cfg.length = 10;
    cfg.chunk = 2;
    cfg.seed = 31;
    std::filesystem::path ref_path = tmp.path / "ref.qgds";
    std::ostringstream ref_log;
    Dataset ref = generate_dataset(GateSet::nisq(), nullptr, cfg, ref_path, &ref_log);
    CHECK(ref_log.str().find("chunk 0/3 generated (2 samples)") != std::string::npos);
    CHECK(ref_log.str().find("chunk 2/3 generated (1 samples)") != std::string::npos);
    CHECK(ref_log.str().find("dataset saved") != std::string::npos);
    CHECK_FALSE(std::filesystem::exists(dataset_chunk_path(ref_path, 0)));

    std::ostringstream reuse_log;
    Dataset again = generate_dataset(GateSet::nisq(), nullptr, cfg, ref_path, &reuse_log);
    CHECK(reuse_log.str().find("dataset reused") != std::string::npos);
    REQUIRE(again.samples.size() == ref.samples.size());
    for (size_t i = 0; i < ref.samples.size(); ++i) CHECK(again.samples[i] == ref.samples[i]);

    // Interrupted run: chunk 0 valid, chunk 1 from a different seed, chunk 2
    // missing, no final file.
    std::filesystem::path out = tmp.path / "resume.qgds";
    save_dataset(generate_chunk(GateSet::nisq(), nullptr, cfg, 0, 2),
                 dataset_chunk_path(out, 0));
    GenerateConfig stale = cfg;
    stale.seed = 77;
    save_dataset(generate_chunk(GateSet::nisq(), nullptr, stale, 2, 4),
                 dataset_chunk_path(out, 1));

    std::ostringstream log;
    Dataset ds = generate_dataset(GateSet::nisq(), nullptr, cfg, out, &log);
    CHECK(log.str().find("chunk 0/3 reused") != std::string::npos);
    CHECK(log.str().find("chunk 1/3 generated") != std::string::npos);
    CHECK(log.str().find("chunk 2/3 generated") != std::string::npos);
    REQUIRE(ds.samples.size() == 5);
    for (size_t i = 0; i < 5; ++i) CHECK(ds.samples[i] == ref.samples[i]);
    CHECK(slurp(out) == slurp(ref_path));
    for (int k = 0; k < 3; ++k)
        CHECK_FALSE(std::filesystem::exists(dataset_chunk_path(out, k)));
}

TEST_CASE("train-sample conversion pads targets and masks occupancy") {
    Circuit c = two_cz_chain();
    LabelConfig cfg;
    Rng rng(5);
    LabeledSample s = label_circuit(c, GateSet::nisq(), nullptr, cfg, rng);
    TrainSample ts = to_train_sample(s, GateSet::nisq());

    Tensor3 x = encode_grid(c, GateSet::nisq());
    CHECK(ts.x.data == x.data);
    REQUIRE(ts.x.h == 4);
    REQUIRE(ts.x.w == 4);
    REQUIRE(ts.target.size() == 16);
    REQUIRE(ts.mask.size() == 16);

    SlotLayout layout = schedule(c);
    for (int q = 0; q < 4; ++q)
        for (int t = 0; t < 4; ++t) {
            size_t i = static_cast<size_t>(q) * 4 + t;
            bool occ = t < layout.depth && layout.at(q, t) >= 0;
            CHECK(ts.mask[i] == (occ ? 1 : 0));
            float want = (q <= 1 && t <= 1) ? 1.0f : 0.0f;
            CHECK(ts.target[i] == want);
        }
}
