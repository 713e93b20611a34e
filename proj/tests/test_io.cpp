#include <gtest/gtest.h>

#include <sstream>

#include "mtlab/io.hpp"

using namespace mtlab;

TEST(DesignJson, RoundTrip) {
  const MomentDesign d = simplex_design(3);
  const MomentDesign back = design_from_json(ojson::parse(design_json(d).dump()));
  ASSERT_EQ(back.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_LE((back.points[i].coords() - d.points[i].coords()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(back.weights[i], d.weights[i]);
  }
  EXPECT_LE(back.residual, 1e-14);
}

TEST(DesignJson, FieldOrder) {
  const ojson j = design_json(antipodal_design(2));
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"n", "m", "points", "weights", "residual"}));
}

TEST(DesignJson, Errors) {
  ojson j = design_json(antipodal_design(2));
  ojson neg = j;
  neg["weights"] = {-0.5, 1.5};
  EXPECT_THROW(design_from_json(neg), InvariantError);
  ojson sum = j;
  sum["weights"] = {0.5, 0.6};
  EXPECT_THROW(design_from_json(sum), InvariantError);
  ojson missing = j;
  missing.erase("points");
  EXPECT_THROW(design_from_json(missing), DomainError);
  ojson shape = j;
  shape["points"][0] = {1.0, 0.0};
  EXPECT_THROW(design_from_json(shape), DomainError);
  ojson norm = j;
  norm["points"][0] = {2.0, 0.0, 0.0};
  EXPECT_THROW(design_from_json(norm), DomainError);
  ojson text = j;
  text["n"] = "two";
  EXPECT_THROW(design_from_json(text), DomainError);
}

TEST(DesignJson, ResidualIsRecomputed) {
  ojson j = design_json(simplex_design(2));
  j["residual"] = 0.0;
  j["weights"] = {0.4, 0.2, 0.2, 0.2};
  EXPECT_GT(design_from_json(j).residual, 1e-3);
}

TEST(FamilyJson, RoundTripAndValidation) {
  FamilySpec s;
  s.n = 2;
  s.centers = simplex_design(2).points;
  s.nu = {0.25, 0.25, 0.25, 0.25};
  s.delta = 0.3;
  s.eps = 1e-3;
  s.m = 2;
  const FamilySpec back = family_from_json(ojson::parse(family_json(s).dump()));
  EXPECT_EQ(back.delta, 0.3);
  EXPECT_EQ(back.m, 2);
  EXPECT_TRUE(back.design().valid());
  ojson close = family_json(s);
  close["delta"] = 0.6;
  EXPECT_THROW(family_from_json(close), InvariantError);
  ojson eps = family_json(s);
  eps["eps"] = 0.5;
  EXPECT_THROW(family_from_json(eps), DomainError);
}

TEST(CertificateJson, Fields) {
  const auto cert = certify_lower_bound({SpherePoint{1, 0, 0}, SpherePoint{-1, 0, 0}});
  ASSERT_TRUE(cert.has_value());
  const ojson j = certificate_json(cert);
  EXPECT_TRUE(j["verified"].get<bool>());
  EXPECT_EQ(j["xi"].size(), 3u);
  EXPECT_TRUE(certificate_json(std::nullopt)["certificate"].is_null());
}

TEST(SweepCsv, HeaderAndRoundTripPrecision) {
  SweepRow row;
  row.eps = 1e-3;
  row.log_integral = 0.1;
  row.a_estimate = 1.0 / 3.0;
  std::ostringstream os;
  write_sweep_csv(os, {row});
  std::istringstream in(os.str());
  std::string header, line;
  std::getline(in, header);
  std::getline(in, line);
  EXPECT_EQ(header, "eps,log_integral,mean_u,energy_v,energy_u,max_moment_defect,ratio_estimate,a_estimate");
  std::vector<double> values;
  std::istringstream cells(line);
  for (std::string cell; std::getline(cells, cell, ',');) values.push_back(std::stod(cell));
  ASSERT_EQ(values.size(), 8u);
  EXPECT_EQ(values[0], row.eps);
  EXPECT_EQ(values[1], row.log_integral);
  EXPECT_EQ(values[7], row.a_estimate);
}

TEST(ReportJson, Fields) {
  ConcentrationReport r;
  r.eps = 1e-3;
  r.atoms = {{SpherePoint{0, 0, 1}, 0.75}, {SpherePoint{0, 0, -1}, 0.25}};
  r.kappa_estimate = 0.75;
  const ojson j = report_json(r);
  EXPECT_EQ(j["atoms"][0]["mass"].get<double>(), 0.75);
  EXPECT_EQ(j["atoms"][1]["point"][2].get<double>(), -1.0);
  EXPECT_EQ(j["diffuse"].get<double>(), 0.0);
  EXPECT_EQ(j["kappa"].get<double>(), 0.75);
}
