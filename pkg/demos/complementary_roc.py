"""
Complementary ROC at low, moderate and high SNR
===============================================

Missed-detection probability against false-alarm probability for u = 5.
The curves come from the sweep module, the same code path behind
``edweibull sweep``.
"""

from edweibull import SweepSpec, run_comp_roc

pf_grid = (0.001, 0.01, 0.05, 0.1, 0.2, 0.5, 0.9)
severities = (0.5, 1.0, 2.0, 3.0)

for snr_db in (-5.0, 10.0, 25.0):
    spec = SweepSpec("comp_roc", u=5, a_values=severities, snr_db_fixed=snr_db, pf_grid=pf_grid)
    points = run_comp_roc(spec)
    print(f"\nsnr = {snr_db:g} dB")
    print("   pf    " + "".join(f"  a={a:<6g}" for a in severities))
    for pf in pf_grid:
        row = [p.pm for p in points if p.pf == pf]
        print(f"{pf:7.3f}  " + "".join(f"  {pm:.6f}" for pm in row))

# The operating point pf = 0.2, a = 1 at the three SNRs
for snr_db in (-5.0, 10.0, 25.0):
    (p,) = run_comp_roc(SweepSpec("comp_roc", u=5, a_values=(1.0,), snr_db_fixed=snr_db, pf_grid=(0.2,)))
    print(f"a=1, pf=0.2, {snr_db:5g} dB: pm = {p.pm:.4f} ({p.method})")
