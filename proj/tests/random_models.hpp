#pragma once

#include "gss/milp.hpp"
#include "oracles.hpp"

inline gss::MilpModel to_model(const oracle::RandomMilp& p) {
  gss::MilpModel m;
  const std::size_t n = p.lp.c.size();
  for (std::size_t j = 0; j < n; ++j) {
    if (j < p.nb) {
      m.add_binary("b" + std::to_string(j));
    } else {
      m.add_variable("c" + std::to_string(j), 0.0, p.lp.ub[j]);
    }
  }
  for (std::size_t i = 0; i < p.lp.A.size(); ++i) {
    gss::LinearExpr e;
    for (std::size_t j = 0; j < n; ++j)
      if (p.lp.A[i][j] != 0.0) e.add(j, p.lp.A[i][j]);
    const auto s = p.lp.sense[i] == oracle::Sense::le   ? gss::RowSense::le
                   : p.lp.sense[i] == oracle::Sense::ge ? gss::RowSense::ge
                                                        : gss::RowSense::eq;
    m.add_constraint("r" + std::to_string(i), e, s, p.lp.b[i]);
  }
  gss::LinearExpr obj;
  for (std::size_t j = 0; j < n; ++j) obj.add(j, p.lp.c[j]);
  m.set_objective(obj, p.maximize ? gss::ObjSense::maximize : gss::ObjSense::minimize);
  return m;
}
