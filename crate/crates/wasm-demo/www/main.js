import init, { curve_info, pairing_demo, search } from "./pkg/hyperpair_wasm.js";

const val = (id) => document.getElementById(id).value.trim();
const big = (id) => BigInt(val(id));

function bind(button, output, run) {
  document.getElementById(button).addEventListener("click", () => {
    const out = document.getElementById(output);
    out.classList.remove("error");
    try {
      out.textContent = JSON.stringify(JSON.parse(run()), null, 2);
    } catch (e) {
      out.classList.add("error");
      out.textContent = String(e);
    }
  });
}

await init();

bind("info-run", "info-out", () => curve_info(big("info-p"), val("info-f")));
bind("pair-run", "pair-out", () =>
  pairing_demo(big("pair-p"), val("pair-f"), big("pair-r"), val("pair-name"), big("pair-seed")));
bind("search-run", "search-out", () =>
  search(big("search-p"), big("search-k"), Number(val("search-bits")), big("search-seed")));
