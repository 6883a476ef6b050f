// Builds the star-plus-arm graph in code, decides it, and prints the
// non-hyperrigidity certificate in text form.

#include "hyperrigid/hyperrigid.hpp"

#include <iostream>

using namespace hyperrigid;

int main() {
  auto g = DiscreteGraphPresentation::make(
      {{"V", Count::finite(1)}, {"W", Count::omega()}, {"U", Count::finite(1)}, {"Z", Count::finite(1)}},
      {{"E", "W", "V", Count::finite(1)}, {"F", "Z", "U", Count::finite(1)}});

  Verdict v = decide_hyperrigid(g);
  std::cout << "hyperrigid: " << (v.hyperrigid ? "yes" : "no") << "\n";
  if (v.hyperrigid) return 0;

  Correspondence c = build_correspondence(g);
  std::cout << "Katsura ideal:";
  for (const auto& n : katsura_ideal(c).names()) std::cout << " " << n;
  std::cout << "\n";

  WitnessCertificate cert = discrete_witness(c, 3);
  std::cout << "evaluation at " << cert.sigma.front() << ", witness edge class " << cert.witness_edge << "\n";
  for (std::size_t n = 0; n < cert.levels.size(); ++n) {
    std::cout << "level " << n << ":";
    for (const auto& p : cert.levels[n]) std::cout << " [" << p << "]";
    std::cout << "  dim M = " << cert.m[n].size() << "\n";
  }
  for (const auto& [name, r] : cert.residuals) std::cout << "  " << name << " = " << to_string(r) << "\n";
  std::cout << "t(" << cert.non_reducing.edge << ") maps the vacuum into M with |P_M t h|^2 = "
            << to_string(cert.non_reducing.projection_norm2) << "\n";
  return cert.all_zero() ? 0 : 1;
}
