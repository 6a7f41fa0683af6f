"""Command-line front end, a thin client of the HTTP service.

By default the commands talk to an in-process instance of the service; pass
``--server URL`` to target a running one instead. Exit codes: 0 success,
1 failed verdict, 2 usage or parse error, 3 resource bound exceeded.
"""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import click

from .reports import ExperimentReport


def _client(server: str | None):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=600.0)
    from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app)


def _fail_from_response(resp) -> None:
    """Translate a non-200 service response into a message and exit code."""
    if resp.status_code == 422:
        click.echo(f"usage error: {resp.text}", err=True)
        sys.exit(2)
    try:
        detail = resp.json().get("detail", {})
    except ValueError:
        detail = {}
    kind = detail.get("kind", "usage")
    message = detail.get("message", resp.text)
    click.echo(f"{kind} error: {message}", err=True)
    sys.exit(3 if kind == "resource" else 2)


def _report_from_payload(payload: dict) -> ExperimentReport:
    report = ExperimentReport(
        payload["experiment"],
        parameters=dict(payload.get("parameters", {})),
        quantities=dict(payload.get("quantities", {})),
    )
    for c in payload.get("checks", []):
        report.add_check(c["name"], c["passed"], c["detail"])
    return report


def _print_report(report: ExperimentReport, duration: float) -> None:
    for key, value in sorted(report.parameters.items()):
        click.echo(f"param     {key} = {value}")
    for key, value in sorted(report.quantities.items()):
        click.echo(f"quantity  {key} = {value}")
    for c in report.checks:
        click.echo(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.detail}")
    click.echo(f"overall: {'PASS' if report.passed else 'FAIL'} ({duration:.2f}s)")


def _write_report_files(report: ExperimentReport, out_dir: Path, duration: float) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(report.to_json())
    (out_dir / "report.csv").write_text(report.to_csv())
    (out_dir / "report.md").write_text(report.to_markdown(duration))


@click.group()
@click.option("--server", default=None, help="URL of a running service; default in-process.")
@click.pass_context
def main(ctx, server):
    """Exact workbench for automata, juntas, and communication matrices."""
    ctx.obj = server


@main.command()
@click.argument("input_file", type=click.Path(path_type=Path))
@click.option("--c1", is_flag=True, help="DNF width (max 1-certificate size).")
@click.option("--c0", is_flag=True, help="CNF width (max 0-certificate size).")
@click.option("--uc1", is_flag=True, help="Unambiguous DNF width (exact for arity <= 5).")
@click.option("--degplus", type=int, default=None, help="Degree budget for the error LP.")
@click.option("--eps", default=None, help="Rational error threshold for a degree verdict.")
@click.option("--out", type=click.Path(path_type=Path), default=None, help="Write JSON here.")
@click.pass_obj
def measure(server, input_file, c1, c0, uc1, degplus, eps, out):
    """Compute width measures of a truth-table, DNF, or junta file."""
    try:
        content = input_file.read_text()
    except OSError as exc:
        click.echo(f"parse error: cannot read {input_file}: {exc}", err=True)
        sys.exit(2)
    with _client(server) as client:
        resp = client.post(
            "/v1/measure",
            json={"content": content, "c1": c1, "c0": c0, "uc1": uc1, "degplus": degplus, "eps": eps},
        )
        if resp.status_code != 200:
            _fail_from_response(resp)
        payload = resp.json()
    for key, value in sorted(payload["quantities"].items()):
        click.echo(f"{key} = {value}")
    if out is not None:
        out.write_text(json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n")


@main.command()
@click.argument("n", type=int)
@click.argument("k", type=int)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--verify", is_flag=True, help="Run the exhaustive slice and rank checks.")
@click.option("--out", type=click.Path(path_type=Path), default=None, help="Directory for automata and reports.")
@click.pass_obj
def disj(server, n, k, seed, verify, out):
    """Build the disjointness automata and separating family for (n, k)."""
    started = time.monotonic()
    with _client(server) as client:
        resp = client.post("/v1/disj", json={"n": n, "k": k, "seed": seed, "verify": verify})
        if resp.status_code != 200:
            _fail_from_response(resp)
        payload = resp.json()
    duration = time.monotonic() - started
    report = _report_from_payload(payload["report"])
    _print_report(report, duration)
    if out is not None:
        out_dir = Path(out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "a1.nfa").write_text(payload["a1"])
        (out_dir / "a2.nfa").write_text(payload["a2"])
        (out_dir / "family.zf").write_text(payload["family"])
        _write_report_files(report, out_dir, duration)
    if verify and not report.passed:
        sys.exit(1)


@main.command()
@click.argument("suite")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(path_type=Path), default=None, help="Directory for reports.")
@click.pass_obj
def repro(server, suite, seed, out):
    """Run a named reproduction suite and report per-check verdicts."""
    started = time.monotonic()
    with _client(server) as client:
        resp = client.post("/v1/repro", json={"suite": suite, "seed": seed})
        if resp.status_code != 200:
            _fail_from_response(resp)
        payload = resp.json()
    duration = time.monotonic() - started
    report = _report_from_payload(payload["report"])
    _print_report(report, duration)
    if out is not None:
        _write_report_files(report, Path(out), duration)
    if not report.passed:
        sys.exit(1)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service under uvicorn."""
    import uvicorn

    uvicorn.run("ufa_workbench.service:app", host=host, port=port)


if __name__ == "__main__":
    main()
