#include <gtest/gtest.h>

#include "leafvgg/architecture.hpp"
#include "leafvgg/error.hpp"

using namespace leafvgg;

TEST(Vgg19, CensusAndShapes) {
  const Architecture arch = build_vgg19(15, 256);
  const LayerCensus c = census(arch);
  EXPECT_EQ(c.conv, 16u);
  EXPECT_EQ(c.maxpool, 5u);
  EXPECT_EQ(c.flatten, 1u);
  EXPECT_EQ(c.dense, 1u);
  EXPECT_EQ(c.softmax, 1u);
  EXPECT_EQ(arch.feature_map_shape(), (Shape{512, 8, 8}));
  EXPECT_EQ(arch.feature_length(), 32768u);
  EXPECT_EQ(arch.class_count(), 15u);
  EXPECT_EQ(arch.input_shape(), (Shape{3, 256, 256}));
}

TEST(Vgg19, BlockWidthsAndNames) {
  const Architecture arch = build_vgg19();
  const auto params = arch.parameters();
  ASSERT_EQ(params.size(), 34u);
  EXPECT_EQ(params[0].name, "conv1_1.weight");
  EXPECT_EQ(params[0].shape, (Shape{64, 3, 3, 3}));
  EXPECT_EQ(params[1].name, "conv1_1.bias");
  std::size_t conv = 0;
  for (const auto& p : params) conv += !p.is_head;
  EXPECT_EQ(conv, 32u);
  EXPECT_EQ(params[31].name, "conv5_4.bias");
  EXPECT_EQ(params[30].shape, (Shape{512, 512, 3, 3}));
  EXPECT_EQ(params[32].name, "head.weight");
  EXPECT_EQ(params[32].shape, (Shape{15, 32768}));
  EXPECT_TRUE(params[33].is_head);

  // widths 64/128/256/512/512 with 2-2-4-4-4 convs per block
  const std::size_t widths[] = {64, 64, 128, 128, 256, 256, 256, 256,
                                512, 512, 512, 512, 512, 512, 512, 512};
  for (std::size_t i = 0; i < 16; ++i) EXPECT_EQ(params[2 * i].shape[0], widths[i]) << i;
}

TEST(Vgg19, SideMustBeMultipleOf32) {
  EXPECT_THROW(build_vgg19(15, 100), ConfigError);
  EXPECT_EQ(build_vgg19(15, 224).feature_map_shape(), (Shape{512, 7, 7}));
}

TEST(Vgg19, ClassicHeadHasThreeDenseLayers) {
  const Architecture arch = build_vgg19_classic();
  const LayerCensus c = census(arch);
  EXPECT_EQ(c.conv, 16u);
  EXPECT_EQ(c.dense, 3u);
  EXPECT_EQ(arch.class_count(), 1000u);
}

TEST(Flops, ClassicVgg19At224IsAbout19Point6Billion) {
  const FlopReport r = count_flops(build_vgg19_classic(), 224);
  EXPECT_NEAR(static_cast<double>(r.total), 19.6e9, 0.05 * 19.6e9);
}

TEST(Flops, ConvLayerCountMatchesHandFormula) {
  // conv1_1 at 224: 224*224 outputs * 64 channels * 3*3*3 window
  const FlopReport r = count_flops(build_vgg19_classic(), 224);
  EXPECT_EQ(r.layers[0].macs, 224ull * 224 * 64 * 27);
  EXPECT_EQ(r.layers.size(), build_vgg19_classic().layers().size());
}

TEST(Flops, DoublingSideQuadruplesConvRows) {
  const Architecture arch = build_vgg19();
  const FlopReport a = count_flops(arch, 128);
  const FlopReport b = count_flops(arch, 256);
  for (std::size_t i = 0; i < a.layers.size(); ++i) {
    if (a.layers[i].type == LayerType::conv) EXPECT_EQ(b.layers[i].macs, 4 * a.layers[i].macs);
  }
}

TEST(Architecture, RejectsMisorderedLayers) {
  std::vector<LayerSpec> no_flatten = {{"c", ConvSpec{4}}, {"d", DenseSpec{2}}, {"s", SoftmaxSpec{}}};
  EXPECT_THROW(Architecture(3, 8, no_flatten), ConfigError);
  std::vector<LayerSpec> no_softmax = {{"c", ConvSpec{4}}, {"f", FlattenSpec{}}, {"d", DenseSpec{2}}};
  EXPECT_THROW(Architecture(3, 8, no_softmax), ConfigError);
  std::vector<LayerSpec> too_small = {{"p1", PoolSpec{}}, {"p2", PoolSpec{}}, {"p3", PoolSpec{}},
                                      {"f", FlattenSpec{}}, {"d", DenseSpec{2}},
                                      {"s", SoftmaxSpec{}}};
  EXPECT_THROW(Architecture(3, 4, too_small), ShapeError);
}

TEST(Tiny, ShapesFollowSide) {
  const Architecture arch = build_tiny(3, 32);
  EXPECT_EQ(arch.feature_map_shape(), (Shape{16, 8, 8}));
  EXPECT_EQ(arch.with_input_side(16).feature_length(), 16u * 4 * 4);
  EXPECT_THROW(build_tiny(3, 30), ConfigError);
}
