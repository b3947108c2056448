#include <gtest/gtest.h>

#include "bom_gen.hpp"
#include "twinaudit/bom/codec.hpp"
#include "twinaudit/bom/diff.hpp"
#include "twinaudit/errors.hpp"

namespace twinaudit {
namespace {

using bom::Bom;
using testing::Gen;
using testing::RandomBom;

constexpr int kCases = 200;

Bom Mutate(Gen& g, const Bom& in) {
  Bom b = in;
  b.version = in.version + static_cast<std::uint64_t>(g.Int(0, 3));
  for (auto& c : b.components) {
    if (g.Bool(0.2)) c.version = g.VersionString();
    if (g.Bool(0.1)) c.properties.push_back({"twinaudit:changed", g.Ident()});
  }
  if (!b.components.empty() && g.Bool(0.3)) {
    b.components.erase(b.components.begin() + g.Int(0, static_cast<int>(b.components.size()) - 1));
  }
  for (int i = g.Int(0, 2); i > 0; --i) {
    bom::Component c;
    c.bom_ref = "new-" + std::to_string(i) + "-" + g.Ident(4, 6);
    c.name = g.Ident();
    c.version = g.VersionString();
    b.components.push_back(c);
  }
  for (auto& v : b.vulnerabilities) {
    if (g.Bool(0.3)) {
      v.cvss_score = bom::CvssScore::FromTenths(g.Int(0, 100));
      v.severity = bom::SeverityForScore(v.cvss_score);
    }
  }
  if (!b.dependencies.empty() && g.Bool(0.3)) b.dependencies.pop_back();
  if (g.Bool(0.2)) b.metadata.subject = g.Ident();
  if (g.Bool(0.2)) b.kind = bom::BomKind::kMixed;
  if (g.Bool(0.2)) b.links.clear();
  if (g.Bool(0.1)) b.extensions["x-note"] = g.Ident();
  return b;
}

TEST(BomDiffProperty, ApplyOfDiffReproducesTarget) {
  Gen g(404);
  for (int i = 0; i < kCases; ++i) {
    const Bom a = RandomBom(g);
    const Bom b = g.Bool(0.7) ? Mutate(g, a) : RandomBom(g, a.serial_number);
    const bom::BomDelta d = bom::DiffBoms(a, b);
    EXPECT_EQ(bom::ApplyDelta(a, d), bom::Canonicalize(b)) << "case " << i;
  }
}

TEST(BomDiffProperty, DeltaJsonRoundTrip) {
  Gen g(505);
  for (int i = 0; i < kCases; ++i) {
    const Bom a = RandomBom(g);
    const Bom b = Mutate(g, a);
    const bom::BomDelta d = bom::DiffBoms(a, b);
    const bom::BomDelta back = bom::DeltaFromJson(bom::ToJson(d));
    EXPECT_EQ(back, d) << "case " << i;
    EXPECT_EQ(bom::ApplyDelta(a, back), bom::Canonicalize(b)) << "case " << i;
  }
}

TEST(BomDiffProperty, SelfDiffIsEmpty) {
  Gen g(606);
  for (int i = 0; i < kCases; ++i) {
    Bom a = RandomBom(g);
    Bom shuffled = a;
    g.Shuffle(shuffled.components);
    g.Shuffle(shuffled.vulnerabilities);
    const bom::BomDelta d = bom::DiffBoms(a, shuffled);
    EXPECT_TRUE(d.IsEmpty()) << "case " << i;
  }
}

TEST(BomDiffProperty, DeltasCompose) {
  Gen g(707);
  for (int i = 0; i < kCases; ++i) {
    const Bom a = RandomBom(g);
    Bom b = Mutate(g, a);
    b.version = a.version + 1;
    Bom c = Mutate(g, b);
    c.version = b.version + 1;
    const Bom via_b = bom::ApplyDelta(bom::ApplyDelta(a, bom::DiffBoms(a, b)), bom::DiffBoms(b, c));
    EXPECT_EQ(via_b, bom::ApplyDelta(a, bom::DiffBoms(a, c))) << "case " << i;
  }
}

TEST(BomDiff, FromVersionMismatchIsConflict) {
  Gen g(1);
  const Bom a = RandomBom(g);
  Bom b = Mutate(g, a);
  b.version = a.version + 1;
  const bom::BomDelta d = bom::DiffBoms(a, b);
  Bom stale = a;
  stale.version = a.version + 5;
  EXPECT_THROW(bom::ApplyDelta(stale, d), ConflictError);
}

TEST(BomDiff, SerialMismatchIsInvalid) {
  Gen g(2);
  const Bom a = RandomBom(g);
  const Bom b = RandomBom(g);
  EXPECT_THROW(bom::DiffBoms(a, b), InvalidArgumentError);
  bom::BomDelta d;
  d.serial_number = b.serial_number;
  d.from_version = a.version;
  EXPECT_THROW(bom::ApplyDelta(a, d), InvalidArgumentError);
}

TEST(BomDiff, KeyedChangeAgainstWrongBaseIsConflict) {
  Gen g(3);
  Bom a = RandomBom(g);
  Bom b = a;
  bom::Component extra;
  extra.bom_ref = "only-in-b";
  extra.name = "x";
  b.components.push_back(extra);
  const bom::BomDelta add = bom::DiffBoms(a, b);
  EXPECT_THROW(bom::ApplyDelta(b, add), ConflictError);
  const bom::BomDelta remove = bom::DiffBoms(b, a);
  EXPECT_THROW(bom::ApplyDelta(a, remove), ConflictError);
}

TEST(BomDiff, ChangedComponentListedOnce) {
  Gen g(4);
  Bom a;
  a.serial_number = "urn:uuid:3e671687-395b-41f5-a30f-a58921a69b79";
  bom::Component c;
  c.bom_ref = "pkg";
  c.name = "pkg";
  c.version = "1.0";
  a.components = {c};
  Bom b = a;
  b.components[0].version = "1.1";
  b.version = 2;
  const bom::BomDelta d = bom::DiffBoms(a, b);
  EXPECT_TRUE(d.components.added.empty());
  EXPECT_TRUE(d.components.removed.empty());
  ASSERT_EQ(d.components.changed.size(), 1u);
  EXPECT_EQ(d.components.changed[0].version, "1.1");
  EXPECT_EQ(d.from_version, 1u);
  EXPECT_EQ(d.to_version, 2u);
  EXPECT_FALSE(d.IsContentEmpty());
}

TEST(BomDiff, MalformedDeltaJsonIsInvalid) {
  EXPECT_THROW(bom::DeltaFromJson(nlohmann::json::object()), InvalidArgumentError);
  EXPECT_THROW(
      bom::DeltaFromJson({{"serialNumber", "x"}, {"fromVersion", "one"}, {"toVersion", 2}}),
      InvalidArgumentError);
}

}  // namespace
}  // namespace twinaudit
