#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "semcomm/dataset.hpp"
#include "semcomm/rng.hpp"

using namespace semcomm;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& f) const { return (path / f).string(); }
};

void write_bytes(const std::string& path, const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("cifar record layout: planar channels, label byte first") {
    TempDir dir("semcomm_cifar_test");
    std::vector<unsigned char> rec(3073, 0);
    rec[0] = 7;  // label
    rec[1] = 255;  // R of pixel (0,0)
    rec[1 + 1024] = 51;  // G of pixel (0,0)
    rec[1 + 2048] = 102;  // B of pixel (0,0)
    rec[1 + 33] = 153;  // R of pixel (1,1): row-major offset 32 + 1
    write_bytes(dir.file("batch.bin"), rec);

    Dataset ds = load_cifar(dir.file("batch.bin"));
    REQUIRE(ds.count() == 1);
    CHECK(ds.height == 32);
    CHECK(ds.width == 32);
    CHECK(ds.channels == 3);
    CHECK(ds.labels[0] == 7);
    const Tensor& img = ds.images[0];
    CHECK(img.shape == Shape{32, 32, 3});
    CHECK(img.data[0] == doctest::Approx(1.0));
    CHECK(img.data[1] == doctest::Approx(51.0 / 255.0));
    CHECK(img.data[2] == doctest::Approx(102.0 / 255.0));
    CHECK(img.data[(1 * 32 + 1) * 3 + 0] == doctest::Approx(153.0 / 255.0));
}

TEST_CASE("cifar load rejects truncated files with a byte offset") {
    TempDir dir("semcomm_cifar_bad");
    write_bytes(dir.file("bad.bin"), std::vector<unsigned char>(3072, 0));
    CHECK_THROWS_WITH_AS(load_cifar(dir.file("bad.bin")), doctest::Contains("3072"),
                         std::runtime_error);
    CHECK_THROWS_AS(load_cifar(dir.file("missing.bin")), std::runtime_error);
}

TEST_CASE("synthetic dataset round trips through the cifar format") {
    TempDir dir("semcomm_cifar_rt");
    Dataset ds = synthesize_dataset(5, 32, 32, 3, 99);
    REQUIRE(ds.count() == 5);
    for (const Tensor& img : ds.images)
        for (double v : img.data) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    save_cifar(ds, dir.file("round.bin"));
    Dataset back = load_cifar(dir.file("round.bin"));
    REQUIRE(back.count() == 5);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < ds.images[i].numel(); ++j) {
            // 8-bit quantization error only
            CHECK(std::abs(back.images[i].data[j] - ds.images[i].data[j]) <= 0.5 / 255.0 + 1e-12);
        }
}

TEST_CASE("synthesis is deterministic in seed and varied across images") {
    Dataset a = synthesize_dataset(3, 16, 16, 3, 4);
    Dataset b = synthesize_dataset(3, 16, 16, 3, 4);
    Dataset c = synthesize_dataset(3, 16, 16, 3, 5);
    for (std::size_t i = 0; i < 3; ++i) CHECK(a.images[i].data == b.images[i].data);
    CHECK(a.images[0].data != c.images[0].data);
    CHECK(a.images[0].data != a.images[1].data);
}

TEST_CASE("ppm parsing of known bytes") {
    TempDir dir("semcomm_ppm_test");
    std::vector<unsigned char> ppm = {'P', '6', '\n', '2', ' ', '1', '\n',
                                      '2', '5', '5', '\n',
                                      255, 0, 0, 0, 128, 255};
    write_bytes(dir.file("a.ppm"), ppm);
    Tensor img = load_pnm(dir.file("a.ppm"));
    REQUIRE(img.shape == Shape{1, 2, 3});
    CHECK(img.data[0] == doctest::Approx(1.0));
    CHECK(img.data[1] == 0.0);
    CHECK(img.data[2] == 0.0);
    CHECK(img.data[3] == 0.0);
    CHECK(img.data[4] == doctest::Approx(128.0 / 255.0));
    CHECK(img.data[5] == doctest::Approx(1.0));
}

TEST_CASE("pnm parser handles comments and pgm grayscale") {
    TempDir dir("semcomm_pgm_test");
    std::vector<unsigned char> pgm = {'P', '5', '\n', '#', ' ', 'x', '\n',
                                      '1', ' ', '2', '\n', '2', '5', '5', '\n', 0, 255};
    write_bytes(dir.file("g.pgm"), pgm);
    Tensor img = load_pnm(dir.file("g.pgm"));
    REQUIRE(img.shape == Shape{2, 1, 1});
    CHECK(img.data[0] == 0.0);
    CHECK(img.data[1] == doctest::Approx(1.0));
}

TEST_CASE("ppm save/load is bit-identical after 8-bit rounding") {
    TempDir dir("semcomm_ppm_rt");
    Dataset ds = synthesize_dataset(1, 8, 10, 3, 7);
    save_ppm(ds.images[0], dir.file("img.ppm"));
    Tensor back = load_pnm(dir.file("img.ppm"));
    REQUIRE(back.shape == ds.images[0].shape);
    save_ppm(back, dir.file("img2.ppm"));
    std::ifstream f1(dir.file("img.ppm"), std::ios::binary);
    std::ifstream f2(dir.file("img2.ppm"), std::ios::binary);
    std::vector<char> b1((std::istreambuf_iterator<char>(f1)), {});
    std::vector<char> b2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(b1 == b2);
}

TEST_CASE("center crop takes the middle window") {
    Tensor img({4, 4, 1});
    for (std::size_t i = 0; i < 16; ++i) img.data[i] = double(i);
    Tensor c = center_crop(img, 2, 2);
    REQUIRE(c.shape == Shape{2, 2, 1});
    CHECK(c.data == std::vector<double>{5, 6, 9, 10});
}

TEST_CASE("resize is an exact pass-through at the same size") {
    Rng rng(8);
    Tensor img({7, 9, 3});
    for (auto& v : img.data) v = rng.uniform(0.0, 1.0);
    Tensor out = resize_bilinear(img, 7, 9);
    CHECK(out.data == img.data);
}

TEST_CASE("resize preserves constant images exactly") {
    Tensor img = Tensor::full({6, 6, 2}, 0.37);
    Tensor out = resize_bilinear(img, 13, 5);
    REQUIRE(out.shape == Shape{13, 5, 2});
    for (double v : out.data) CHECK(v == doctest::Approx(0.37).epsilon(1e-14));
}

TEST_CASE("resize of a linear ramp stays within the input range") {
    Tensor img({1, 5, 1}, {0.0, 0.25, 0.5, 0.75, 1.0});
    Tensor out = resize_bilinear(img, 1, 9);
    double prev = -1.0;
    for (double v : out.data) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK(v >= prev);  // monotone along the ramp
        prev = v;
    }
}

TEST_CASE("image folder loading: sorted order, skips junk, resizes") {
    TempDir dir("semcomm_folder_test");
    Dataset src = synthesize_dataset(3, 12, 12, 3, 11);
    save_ppm(src.images[2], dir.file("a.ppm"));
    save_ppm(src.images[0], dir.file("b.ppm"));
    save_ppm(src.images[1], dir.file("c.ppm"));
    write_bytes(dir.file("junk.ppm"), {'n', 'o', 't', 'a', 'p', 'p', 'm'});

    Dataset ds = load_image_folder(dir.path.string(), 8, 8);
    REQUIRE(ds.count() == 3);
    CHECK(ds.height == 8);
    CHECK(ds.width == 8);
    CHECK(ds.channels == 3);
    // sorted by filename: a.ppm (src 2) first
    Tensor expect = resize_bilinear(center_crop(load_pnm(dir.file("a.ppm")), 12, 12), 8, 8);
    CHECK(ds.images[0].data == expect.data);
}

TEST_CASE("image folder with no decodable files is an error") {
    TempDir dir("semcomm_folder_empty");
    write_bytes(dir.file("junk.ppm"), {'x'});
    CHECK_THROWS_AS(load_image_folder(dir.path.string(), 8, 8), std::runtime_error);
    CHECK_THROWS_AS(load_image_folder((dir.path / "nope").string(), 8, 8), std::runtime_error);
}

TEST_CASE("non-square sources are cropped to aspect before resizing") {
    TempDir dir("semcomm_folder_crop");
    Dataset src = synthesize_dataset(1, 10, 20, 3, 13);
    save_ppm(src.images[0], dir.file("wide.ppm"));
    Dataset ds = load_image_folder(dir.path.string(), 8, 8);
    REQUIRE(ds.count() == 1);
    Tensor expect = resize_bilinear(center_crop(src.images[0], 10, 10), 8, 8);
    for (std::size_t i = 0; i < expect.numel(); ++i)
        CHECK(ds.images[0].data[i] == doctest::Approx(expect.data[i]).epsilon(2.0 / 255.0));
}
