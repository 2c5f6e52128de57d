'use strict';
// Runs each program in tests/behavior/programs as original, instrumented and
// elided variants and checks that they print the same thing. Executed
// functions are cross-checked against V8's own function coverage.
//
//   node run_behavior.js <jscov binary> <programs dir> <work dir>

const { execFileSync } = require('node:child_process');
const crypto = require('node:crypto');
const fs = require('node:fs');
const inspector = require('node:inspector');
const path = require('node:path');
const vm = require('node:vm');

const [jscov, programsDir, workDir] = process.argv.slice(2);
if (!jscov || !programsDir || !workDir) {
  console.error('usage: node run_behavior.js <jscov> <programs dir> <work dir>');
  process.exit(2);
}

const session = new inspector.Session();
session.connect();
const post = (method, params = {}) =>
  new Promise((resolve, reject) => session.post(method, params, (err, res) => (err ? reject(err) : resolve(res))));

let runCounter = 0;

// Executes `source` in a fresh context. Sidecar GETs are answered from
// `sidecarDir`; beacons are captured from both transports.
async function run(source, { fullRun, sidecarDir = null, useSendBeacon = false, coverage = false }) {
  const out = [];
  const beacons = [];
  const fetched = [];
  const timers = [];
  class XMLHttpRequest {
    open(method, url, async) {
      this.method = method;
      this.url = url;
      this.async = async;
    }
    setRequestHeader() {}
    send(body) {
      if (this.method === 'POST') {
        beacons.push({ transport: 'xhr', url: this.url, body });
        this.status = 204;
        return;
      }
      fetched.push(this.url);
      const id = this.url.split('/').pop();
      const file = sidecarDir && path.join(sidecarDir, id);
      if (file && fs.existsSync(file)) {
        this.status = 200;
        this.responseText = fs.readFileSync(file, 'utf8');
      } else {
        this.status = 404;
        this.responseText = '';
      }
    }
  }
  const sandbox = {
    out,
    FULL_RUN: fullRun,
    XMLHttpRequest,
    setTimeout: (fn) => timers.push(fn),
    location: { href: 'https://page.test/index.html' },
  };
  if (useSendBeacon) {
    sandbox.navigator = {
      sendBeacon(url, body) {
        beacons.push({ transport: 'sendBeacon', url, body });
        return true;
      },
    };
  }
  const context = vm.createContext(sandbox);
  const filename = `/behavior/run${++runCounter}.js`;
  if (coverage) await post('Profiler.startPreciseCoverage', { callCount: true, detailed: false });
  let error = null;
  try {
    vm.runInContext(source, context, { filename });
    // Let promise chains settle, then fire queued timers one at a time.
    for (let spins = 0; spins < 1000; spins++) {
      await new Promise((r) => setImmediate(r));
      if (timers.length === 0) break;
      timers.shift()();
    }
  } catch (e) {
    error = String(e && e.stack ? e.stack.split('\n')[0] : e);
  }
  let functions = null;
  if (coverage) {
    const res = await post('Profiler.takePreciseCoverage');
    await post('Profiler.stopPreciseCoverage');
    const script = res.result.find((s) => s.url === filename || s.url.endsWith(filename));
    functions = script ? script.functions : [];
  }
  return { out: JSON.stringify(out), error, beacons, fetched, functions };
}

function jscovJson(args) {
  return JSON.parse(execFileSync(jscov, args, { encoding: 'utf8' }));
}

// Maps V8's executed functions onto units: V8 ranges end where unit spans
// end; among units sharing an end, the innermost one starting at or before
// V8's start is meant.
function executedIds(units, functions) {
  const ids = new Set();
  for (const f of functions) {
    const r = f.ranges[0];
    if (r.count === 0) continue;
    let best = null;
    for (const u of units) {
      if (u.span[1] !== r.endOffset || u.span[0] > r.startOffset) continue;
      if (!best || u.span[0] > best.span[0]) best = u;
    }
    if (best) ids.add(best.id);
  }
  return ids;
}

function sameSet(a, b) {
  return a.size === b.size && [...a].every((x) => b.has(x));
}

async function checkProgram(file, index) {
  const problems = [];
  const name = path.basename(file, '.js');
  const dir = path.join(workDir, name);
  fs.mkdirSync(dir, { recursive: true });
  const url = `https://behavior.test/${name}.js`;
  const source = fs.readFileSync(file, 'utf8');
  const analysis = jscovJson(['analyze', '--format', 'json', '--url', url, file]);
  if (!analysis.parse_ok) return [`${name}: does not parse`];

  const instrumentedFile = path.join(dir, 'instrumented.js');
  execFileSync(jscov, ['instrument', '--url', url, '-o', instrumentedFile, file]);
  const instrumented = fs.readFileSync(instrumentedFile, 'utf8');

  // Learning run: the instrumented variant's beacon against V8's coverage.
  const useSendBeacon = index % 2 === 0;
  const origLearn = await run(source, { fullRun: false, coverage: true });
  const instLearn = await run(instrumented, { fullRun: false, useSendBeacon });
  if (origLearn.error) problems.push(`original threw ${origLearn.error}`);
  if (instLearn.out !== origLearn.out) problems.push(`instrumented output ${instLearn.out} != ${origLearn.out}`);
  if (instLearn.beacons.length !== 1) {
    problems.push(`${instLearn.beacons.length} beacons sent`);
    return problems.map((p) => `${name}: ${p}`);
  }
  const beacon = instLearn.beacons[0];
  if (beacon.transport !== (useSendBeacon ? 'sendBeacon' : 'xhr')) problems.push(`beacon sent by ${beacon.transport}`);
  if (beacon.url !== '/__jscov__/beacon') problems.push(`beacon posted to ${beacon.url}`);
  const wire = JSON.parse(beacon.body);
  const hash = crypto.createHash('sha256').update(source, 'utf8').digest('hex');
  if (JSON.stringify(Object.keys(wire)) !== JSON.stringify(['v', 'key', 'ids', 'page'])) {
    problems.push(`beacon fields ${Object.keys(wire)}`);
  }
  if (wire.v !== 1) problems.push(`beacon version ${wire.v}`);
  if (wire.key.url !== url || wire.key.hash !== hash) problems.push(`beacon key ${JSON.stringify(wire.key)}`);
  if (wire.page !== 'https://page.test/index.html') problems.push(`beacon page ${wire.page}`);
  if (new Set(wire.ids).size !== wire.ids.length) problems.push('beacon ids are not deduplicated');
  const oracle = executedIds(analysis.units, origLearn.functions);
  if (!sameSet(new Set(wire.ids), oracle)) {
    problems.push(`beacon ids [${[...wire.ids].sort()}] != executed [${[...oracle].sort()}]`);
  }

  // Full runs: every variant prints what the original prints.
  const reference = await run(source, { fullRun: true });
  if (reference.error) problems.push(`original (full) threw ${reference.error}`);
  const instFull = await run(instrumented, { fullRun: true });
  if (instFull.out !== reference.out) problems.push(`instrumented (full) output ${instFull.out} != ${reference.out}`);

  const configs = [
    { label: 'learned', ids: wire.ids, permissive: false },
    { label: 'learned-permissive', ids: wire.ids, permissive: true },
    { label: 'nothing-executed', ids: [], permissive: true },
  ];
  for (const config of configs) {
    const cdir = path.join(dir, config.label);
    const sidecars = path.join(cdir, 'sidecars');
    fs.mkdirSync(sidecars, { recursive: true });
    const coverageFile = path.join(cdir, 'coverage.txt');
    fs.writeFileSync(coverageFile, config.ids.map((id) => id + '\n').join(''));
    const elidedFile = path.join(cdir, 'elided.js');
    const statsFile = path.join(cdir, 'stats.json');
    const args = ['elide', '--url', url, '--coverage', coverageFile, '--sidecar-dir', sidecars, '--stats', statsFile,
      '-o', elidedFile];
    if (config.permissive) args.push('--permissive');
    execFileSync(jscov, [...args, file]);
    const stats = JSON.parse(fs.readFileSync(statsFile, 'utf8'));
    const elided = await run(fs.readFileSync(elidedFile, 'utf8'), { fullRun: true, sidecarDir: sidecars });
    if (elided.error) problems.push(`${config.label}: elided variant threw ${elided.error}`);
    if (elided.out !== reference.out) problems.push(`${config.label}: output ${elided.out} != ${reference.out}`);
    if (new Set(elided.fetched).size !== elided.fetched.length) problems.push(`${config.label}: sidecar fetched twice`);
    if (config.label === 'nothing-executed' && stats.elided_functions === 0) problems.push('nothing was elided');
    if (config.label === 'nothing-executed' && elided.fetched.length === 0) problems.push('no fallback was exercised');
  }
  return problems.map((p) => `${name}: ${p}`);
}

(async () => {
  await post('Profiler.enable');
  const files = fs.readdirSync(programsDir).filter((f) => f.endsWith('.js')).sort();
  let failed = 0;
  for (let i = 0; i < files.length; i++) {
    const problems = await checkProgram(path.join(programsDir, files[i]), i);
    if (problems.length) {
      failed++;
      for (const p of problems) console.log(`FAIL ${p}`);
    } else {
      console.log(`PASS ${files[i]}`);
    }
  }
  console.log(`${files.length - failed}/${files.length} programs behave identically`);
  process.exit(failed === 0 && files.length >= 20 ? 0 : 1);
})().catch((e) => {
  console.error(e);
  process.exit(1);
});
