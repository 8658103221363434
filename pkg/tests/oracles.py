"""Frozen reference values, regenerated by ``tools/make_oracles.py`` (mpmath, 50 digits)."""

ML_05_05_m1 = 0.13660600739194928
ML_05_05_m100 = 2.8205248812996592e-5
ML_05_05_m1_erfc = 0.13660600739194928
ML_07_07_m10p85 = 0.002289311927575045
ML_03_1_m5 = 0.13708086902027064
ML_09_1_m30 = 0.0037137076984598521
PARETO_LAPLACE_06_1 = 0.49792002193442195
PARETO_H_06_X0p1 = 0.016530147548382904
PARETO_H_06_X0p001 = 1.1916842312167011e-5
PARETO_H_06_2 = 1.2805493613688635
C_ALPHA_05 = 0.63661977236758134
C_ALPHA_03 = 0.85839369133413978
HEAVY_TARGET_03_06 = 0.24949903484866205
HEAVY_K_03_06 = 0.075382495466714342
ML_TAIL_05_1_at_3 = 0.28734124953345625
ML_DENSITY_05_1_at_3 = 0.0383937584018237
ML_TAIL_07_2_at_0p5 = 0.33838531062055965
LEVY_TAIL_at_2 = 0.38292492254802621
LEVY_DENSITY_at_1 = 0.2196956447338612
