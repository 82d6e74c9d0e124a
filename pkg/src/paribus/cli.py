"""Command-line front end.

Exit codes: 0 success or true/satisfiable, 1 false/unsatisfiable/violation,
2 usage or input error, 3 resource cap exceeded, 4 internal disagreement
between a pipeline and its oracle.
"""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click

from paribus.config import CapExceeded
from paribus.models import (
    ClpcModel,
    ModelError,
    StitModel,
    dump_model,
    load_model,
    model_from_dict,
    validate_stit,
)
from paribus.parsing import LANGUAGES, ParseError, parse, to_text
from paribus.sat.dpll import make_engine
from paribus.sat.oracles import (
    sat_clpc_direct,
    sat_pecp_bruteforce,
    sat_s5_bruteforce,
    sat_stit_oracle,
)
from paribus.sat.pipelines import (
    sat_clpc_via_embedding,
    sat_individual_stit,
    sat_pecp,
    sat_stit_bounded,
)
from paribus.sat.s5 import sat_s5
from paribus.semantics import S5Evaluator, eval_clpc, evaluator_for
from paribus.syntax import (
    And,
    agents_of,
    atoms_of,
    coalitions_in,
    is_individual_stit,
    is_nested,
    language_of,
    length,
    signatures_in,
)
from paribus.translate import (
    RepScheme,
    bridge_parts,
    clpc_digits,
    clpc_to_pecp,
    clpc_to_stit,
    dag_size,
    grid_m,
    reduce_rewrite,
    tr,
    tr2,
    tr4_with_control,
)
from paribus.verify import SUITES, run_suites

log = logging.getLogger("paribus")

EXIT_OK, EXIT_FALSE, EXIT_INPUT, EXIT_CAP, EXIT_DISAGREE = 0, 1, 2, 3, 4


class Failure(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _emit(as_json: bool, payload: dict, text: str) -> None:
    if as_json:
        click.echo(json.dumps(payload, indent=2, sort_keys=True, default=str))
    else:
        click.echo(text)


def _run(fn):
    """Map library errors onto the exit code contract."""
    try:
        code = fn()
    except Failure as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(exc.code)
    except ParseError as exc:
        click.echo(f"parse error: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    except CapExceeded as exc:
        click.echo(f"resource cap: {exc}", err=True)
        sys.exit(EXIT_CAP)
    except (ModelError, ValueError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    sys.exit(code or EXIT_OK)


def _read_formula(language: str, formula: str | None, file: str | None):
    if (formula is None) == (file is None):
        raise Failure("give exactly one of --formula and --file", EXIT_INPUT)
    text = formula if formula is not None else Path(file).read_text(encoding="utf-8")
    return parse(language, text)


def _atoms_option(text: str | None):
    if text is None:
        return None
    return [a.strip() for a in text.split(",") if a.strip()]


def _formula_stats(f) -> dict:
    return {
        "length": length(f),
        "dag_size": dag_size(f),
        "atoms": sorted(atoms_of(f)),
        "signatures": sorted(sorted(s) for s in signatures_in(f)),
        "coalitions": sorted(sorted(c) for c in coalitions_in(f)),
        "nested": is_nested(f),
        "individual": is_individual_stit(f),
    }


json_option = click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
logic_option = click.option(
    "--logic", type=click.Choice(LANGUAGES), required=True, help="Formula language."
)
formula_options = [
    click.option("--formula", help="Formula text."),
    click.option("--file", type=click.Path(dir_okay=False), help="Read the formula from a file."),
]


def _with(options):
    def deco(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn

    return deco


@click.group()
@click.option("-v", "--verbose", count=True, help="More logging.")
@click.version_option(package_name="artifact")
def main(verbose: int) -> None:
    """Ceteris paribus logics: parse, model check, translate and decide."""
    level = logging.WARNING - 10 * verbose
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


@main.command("parse")
@logic_option
@_with(formula_options)
@json_option
def cmd_parse(logic, formula, file, as_json):
    """Print the canonical form of a formula with size statistics."""

    def go():
        f = _read_formula(logic, formula, file)
        stats = _formula_stats(f)
        text = to_text(f)
        _emit(as_json, {"formula": text, **stats}, text + "\n" + json.dumps(stats, sort_keys=True))

    _run(go)


def _model_logic(m) -> str:
    if isinstance(m, StitModel):
        return "stit"
    if isinstance(m, ClpcModel):
        return "clpc"
    return "pecp"


@main.command("check")
@click.option("--model", "model_path", required=True, type=click.Path(dir_okay=False))
@click.option("--world", help="World to evaluate at; omit for a per-world table.")
@click.option("--formula", required=True, help="Formula text.")
@click.option("--logic", type=click.Choice(LANGUAGES), help="Defaults to the model's logic.")
@json_option
def cmd_check(model_path, world, formula, logic, as_json):
    """Evaluate a formula in a model file."""

    def go():
        m = load_model(model_path)
        kind = _model_logic(m)
        lang = logic or kind
        allowed = {"pecp": ("pecp", "s5"), "stit": ("stit",), "clpc": ("clpc",)}[kind]
        if lang not in allowed:
            raise Failure(f"a {kind} model cannot evaluate {lang} formulas", EXIT_INPUT)
        f = parse(lang, formula)
        if kind == "clpc":
            if world is not None:
                raise Failure("CL-PC models have no worlds; drop --world", EXIT_INPUT)
            value = eval_clpc(m, f)
            _emit(as_json, {"formula": to_text(f), "value": value}, str(value).lower())
            return EXIT_OK if value else EXIT_FALSE
        if lang == "s5" and language_of(f) == "s5":
            ev = S5Evaluator(m)
        else:
            ev = evaluator_for(m, f)
        if world is not None:
            m.require_world(world)
            value = ev.holds(world, f)
            _emit(
                as_json,
                {"formula": to_text(f), "world": world, "value": value},
                str(value).lower(),
            )
            return EXIT_OK if value else EXIT_FALSE
        table = {w: ev.holds(w, f) for w in m.worlds}
        lines = [f"{w}\t{str(v).lower()}" for w, v in table.items()]
        _emit(as_json, {"formula": to_text(f), "values": table}, "\n".join(lines))
        return EXIT_OK

    _run(go)


@main.command("validate")
@click.option("--model", "model_path", required=True, type=click.Path(dir_okay=False))
@json_option
def cmd_validate(model_path, as_json):
    """Check the frame conditions of a model file."""

    def go():
        try:
            data = json.loads(Path(model_path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise Failure(f"{model_path}: invalid JSON: {exc}", EXIT_INPUT) from exc
        try:
            m = model_from_dict(data)
        except ModelError as exc:
            problems = [str(exc)]
        else:
            problems = validate_stit(m) if isinstance(m, StitModel) else []
        ok = not problems
        _emit(
            as_json,
            {"ok": ok, "violations": problems},
            "ok" if ok else "\n".join(f"violation: {p}" for p in problems),
        )
        return EXIT_OK if ok else EXIT_FALSE

    _run(go)


TRANSLATIONS = {
    ("pecp", "s5"): "tr: PECP to S5 with one fresh atom per box",
    ("pecp", "pecp"): "Reduce rewriting to the global modality",
    ("stit", "pecp"): "tr2 with rep atoms (GRID_m with --with-grid)",
    ("clpc", "stit"): "bridge formulas and tr3",
    ("clpc", "pecp"): "GRID_m, tr2, bridge formulas and tr3",
    ("pecp", "stit"): "tr4 and CONTROL for the nested fragment",
}


@main.command("translate")
@click.option("--from", "src", type=click.Choice(LANGUAGES), required=True)
@click.option("--to", "dst", type=click.Choice(LANGUAGES), required=True)
@_with(formula_options)
@click.option("--m-digits", type=int, help="Rep digits per agent (STIT to PECP).")
@click.option("--n-agents", type=int, help="Number of agents.")
@click.option("--atoms", help="Comma separated atom universe (CL-PC).")
@click.option("--with-grid", is_flag=True, help="Conjoin GRID_m (STIT to PECP).")
@json_option
def cmd_translate(src, dst, formula, file, m_digits, n_agents, atoms, with_grid, as_json):
    """Translate a formula between logics and report sizes."""

    def go():
        if (src, dst) not in TRANSLATIONS:
            pairs = ", ".join(f"{a}->{b}" for a, b in TRANSLATIONS)
            raise Failure(f"no translation {src}->{dst}; available: {pairs}", EXIT_INPUT)
        f = _read_formula(src, formula, file)
        report: dict = {"input_length": length(f), "input_dag_size": dag_size(f)}
        if (src, dst) == ("pecp", "s5"):
            out = tr(f)
        elif (src, dst) == ("pecp", "pecp"):
            out = reduce_rewrite(f)
        elif (src, dst) == ("stit", "pecp"):
            n = n_agents or max(agents_of(f), default=1)
            scheme = RepScheme(m_digits or 1, n)
            out = tr2(f, scheme)
            if with_grid:
                grid = grid_m(scheme)
                report["grid_dag_size"] = dag_size(grid)
                out = And(grid, out)
        elif src == "clpc":
            universe = _atoms_option(atoms) or sorted(atoms_of(f))
            n = n_agents or max(agents_of(f), default=1)
            if len(universe) > 8:
                log.warning("GRID* has 2^%d conjuncts", len(universe))
            parts = bridge_parts(n, universe)
            report["bridge_dag_sizes"] = {k: dag_size(v) for k, v in parts.items()}
            if dst == "stit":
                out = clpc_to_stit(f, n, universe)
            else:
                report["m_digits"] = clpc_digits(universe)
                out = clpc_to_pecp(f, n, universe)
        else:
            emb = tr4_with_control(f)
            report["agent_of"] = emb.agent_of
            out = emb.formula
        report.update(output_length=length(out), output_dag_size=dag_size(out))
        text = to_text(out)
        summary = " ".join(f"{k}={v}" for k, v in report.items() if not isinstance(v, dict))
        _emit(as_json, {"formula": text, "report": report}, f"{text}\n# {summary}")

    _run(go)


def _sat_routes(logic, f, m_digits, n_agents, atoms, engine):
    """(pipeline thunk, oracle thunk) for one logic."""
    if logic == "pecp":
        return (lambda: sat_pecp(f, engine=engine)), (lambda: sat_pecp_bruteforce(f))
    if logic == "s5":
        return (lambda: sat_s5(f, engine=engine)), (lambda: sat_s5_bruteforce(f))
    if logic == "stit":
        n = n_agents or max(agents_of(f), default=1)
        if m_digits:
            pipe = lambda: sat_stit_bounded(f, m_digits, n, engine=engine)  # noqa: E731
            orc = lambda: sat_stit_oracle(f, n_agents=n, max_choices=2**m_digits)  # noqa: E731
        elif is_individual_stit(f):
            pipe = lambda: sat_individual_stit(f, engine=engine)  # noqa: E731
            orc = lambda: sat_stit_oracle(f, n_agents=n)  # noqa: E731
        else:
            raise Failure("group STIT formulas need --m-digits (choices bounded by 2^m)", EXIT_INPUT)
        return pipe, orc
    n = n_agents or max(agents_of(f), default=1)
    universe = atoms or sorted(atoms_of(f))
    return (
        lambda: sat_clpc_via_embedding(f, n, universe, engine=engine),
        lambda: sat_clpc_direct(f, n, universe),
    )


@main.command("sat")
@logic_option
@_with(formula_options)
@click.option(
    "--method", type=click.Choice(["pipeline", "oracle", "both"]), default="both", show_default=True
)
@click.option("--m-digits", type=int, help="STIT: bound choices per agent by 2^m.")
@click.option("--n-agents", type=int, help="Number of agents (STIT, CL-PC).")
@click.option("--atoms", help="CL-PC atom universe, comma separated.")
@click.option("--engine", default="cdcl", show_default=True, help="cdcl, dpll or external:CMD.")
@click.option("--witness", type=click.Path(dir_okay=False), help="Write a witness model here.")
@json_option
def cmd_sat(logic, formula, file, method, m_digits, n_agents, atoms, engine, witness, as_json):
    """Decide satisfiability; with --method both the two routes must agree."""

    def go():
        f = _read_formula(logic, formula, file)
        pipe, orc = _sat_routes(logic, f, m_digits, n_agents, _atoms_option(atoms), make_engine(engine))
        verdicts = {}
        notes = []
        if method in ("pipeline", "both"):
            verdicts["pipeline"] = pipe()
        if method in ("oracle", "both"):
            try:
                verdicts["oracle"] = orc()
            except CapExceeded as exc:
                if method == "oracle":
                    raise
                notes.append(f"oracle skipped: {exc}")
        answers = {k: v.satisfiable for k, v in verdicts.items()}
        agree = len(set(answers.values())) == 1
        main_v = verdicts.get("pipeline") or verdicts["oracle"]
        if witness and main_v.satisfiable:
            dump_model(main_v.witness, witness)
        payload = {
            "formula": to_text(f),
            "satisfiable": main_v.satisfiable,
            "verdicts": {
                k: {"satisfiable": v.satisfiable, "method": v.method, "world": v.world, "stats": v.stats}
                for k, v in verdicts.items()
            },
            "agree": agree,
            "notes": notes,
        }
        lines = [f"{k}: {'sat' if v else 'unsat'} ({verdicts[k].method})" for k, v in answers.items()]
        if len(verdicts) == 2:
            lines.append("AGREE" if agree else "DISAGREE")
        if main_v.satisfiable and main_v.world is not None:
            lines.append(f"world: {main_v.world}")
        lines += notes
        _emit(as_json, payload, "\n".join(lines))
        if not agree:
            return EXIT_DISAGREE
        return EXIT_OK if main_v.satisfiable else EXIT_FALSE

    _run(go)


@main.command("verify")
@click.option(
    "--suite",
    type=click.Choice(sorted(SUITES) + ["all"]),
    default="all",
    show_default=True,
)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--cases", type=int, help="Override the number of cases per suite.")
@click.option("--engine", default="cdcl", show_default=True, help="cdcl, dpll or external:CMD.")
@json_option
def cmd_verify(suite, seed, cases, engine, as_json):
    """Run seeded verification suites."""

    def go():
        results = run_suites("all" if suite == "all" else [suite], seed, cases, make_engine(engine))
        lines = []
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            lines.append(f"{status} {r.name}: {r.cases} checks, {r.elapsed:.1f}s, digest {r.digest[:16]}")
            lines += [f"  {msg}" for msg in r.failures[:10]]
        _emit(as_json, {"suites": [r.to_dict() for r in results]}, "\n".join(lines))
        return EXIT_OK if all(r.passed for r in results) else EXIT_FALSE

    _run(go)


if __name__ == "__main__":  # pragma: no cover
    main()
