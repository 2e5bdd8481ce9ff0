// Thin client: all discovery and filtering happens server-side. Folding and
// highlighting are view-only and never refetch the model.
"use strict";

const state = {
  paths: 1,
  minDepth: 0,
  maxDepth: null, // null keeps every level
  folded: new Set(),
  searchQuery: "",
  selected: null,
};

let model = null;
let hits = new Set();
let debounce = null;
let generation = 0;

const $ = (id) => document.getElementById(id);

function params() {
  const p = new URLSearchParams({ paths: String(state.paths), min_depth: String(state.minDepth) });
  if (state.maxDepth !== null) p.set("max_depth", String(state.maxDepth));
  return p;
}

async function getJson(url) {
  const r = await fetch(url);
  if (!r.ok) throw new Error(`${r.status}: ${await r.text()}`);
  return r.json();
}

async function refresh() {
  const mine = ++generation;
  try {
    const m = await getJson(`/api/model?${params()}`);
    if (mine !== generation) return; // a newer request superseded this one
    model = m;
    $("status").textContent = "";
    await search();
  } catch (e) {
    if (mine === generation) $("status").textContent = e.message;
  }
}

function schedule() {
  clearTimeout(debounce);
  debounce = setTimeout(refresh, 250);
}

async function search() {
  if (state.searchQuery === "") {
    hits = new Set();
  } else {
    const p = params();
    p.set("q", state.searchQuery);
    hits = new Set(await getJson(`/api/search?${p}`));
  }
  render();
  const first = document.querySelector(".hit");
  if (first) first.scrollIntoView({ block: "nearest" });
}

function el(tag, cls, text) {
  const e = document.createElement(tag);
  if (cls) e.className = cls;
  if (text !== undefined) e.textContent = text;
  return e;
}

function freq(n) {
  return n.freq === undefined ? null : el("span", "freq", String(n.freq));
}

const GLYPH = { seq: "→", xor: "×", par: "∧", loop: "⟲" };

function view(n, names) {
  const wrap = el("div", "node");
  wrap.dataset.id = n.id;
  if (state.selected === n.id) wrap.classList.add("selected");
  switch (n.kind) {
    case "tau":
      wrap.append(el("span", "tau", "τ"));
      break;
    case "act": {
      const a = el("span", "act", n.activity);
      if (hits.has(n.id)) a.classList.add("hit");
      const f = freq(n);
      if (f) a.append(f);
      a.onclick = () => select(n.id);
      wrap.append(a);
      break;
    }
    case "rec": {
      const target = names.get(n.name);
      const r = el("span", "rec", `↺ ${n.name}`);
      r.title = "recursion back to the enclosing call";
      r.onclick = () => target && select(target);
      wrap.append(r);
      break;
    }
    case "sub": {
      wrap.classList.add("sub");
      if (hits.has(n.id)) wrap.classList.add("hit");
      if (state.folded.has(n.id)) wrap.classList.add("folded");
      const title = el("div", "title", n.name);
      const f = freq(n);
      if (f) title.append(f);
      title.onclick = () => toggle(n.id);
      wrap.append(title);
      const inner = new Map(names).set(n.name, n.id);
      for (const c of n.children) wrap.append(view(c, inner));
      break;
    }
    default:
      wrap.classList.add("op");
      wrap.append(el("span", "tag", GLYPH[n.kind] || n.kind));
      for (const c of n.children) wrap.append(view(c, names));
  }
  return wrap;
}

function render() {
  const root = $("model");
  root.replaceChildren();
  if (model) root.append(view(model, new Map()));
}

function toggle(id) {
  if (state.folded.has(id)) state.folded.delete(id);
  else state.folded.add(id);
  render();
}

function select(id) {
  state.selected = state.selected === id ? null : id;
  render();
}

async function loadStats() {
  const s = await getJson("/api/stats");
  const dl = $("stats");
  for (const [k, v] of [
    ["traces", s.traces],
    ["events", s.events],
    ["depth", s.depth],
    ["activities", s.alphabet.length],
    ["avg. length", s.avg_trace_len.toFixed(1)],
  ]) {
    dl.append(el("dt", null, k), el("dd", null, String(v)));
  }
  $("min-depth").max = String(s.depth);
  $("max-depth").max = String(s.depth + 1);
  $("max-depth").value = String(s.depth + 1);
}

function wire() {
  $("paths").oninput = (e) => {
    state.paths = Number(e.target.value);
    $("paths-out").textContent = state.paths.toFixed(2);
    schedule();
  };
  $("min-depth").oninput = (e) => {
    state.minDepth = Number(e.target.value);
    $("min-out").textContent = String(state.minDepth);
    if (state.maxDepth !== null && state.maxDepth < state.minDepth) {
      state.maxDepth = state.minDepth;
      $("max-depth").value = String(state.maxDepth);
      $("max-out").textContent = String(state.maxDepth);
    }
    schedule();
  };
  $("max-depth").oninput = (e) => {
    const v = Number(e.target.value);
    state.maxDepth = v > Number(e.target.max) - 1 ? null : Math.max(v, state.minDepth);
    $("max-out").textContent = state.maxDepth === null ? "all" : String(state.maxDepth);
    schedule();
  };
  $("search").oninput = (e) => {
    state.searchQuery = e.target.value.trim();
    search().catch((err) => ($("status").textContent = err.message));
  };
}

wire();
loadStats().then(refresh, (e) => ($("status").textContent = e.message));
