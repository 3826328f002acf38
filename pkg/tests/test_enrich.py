import pytest

from lodlink.dataset import DataSource
from lodlink.enrich import (
    DEFAULT_EXCLUDED_PROPERTIES,
    EnrichmentMode,
    MergePolicy,
    PolicyError,
    UnresolvableLinkTarget,
    inject_links,
    merge_metadata,
    parse_merge_policy,
    render_provenance,
)
from lodlink.io import FormatTag, parse
from lodlink.matcher import Link, LinkSet, Verdict, generate_links
from lodlink.model import Graph, Iri, Literal, Triple, isomorphic
from lodlink.rules import parse_rule_spec
from lodlink.vocab import AKT_NS, DCT_TITLE, OWL_SAME_AS, RDF_TYPE

EX = "http://example.org/"

PAPER = Iri("http://lars.org/Paper/001")
DBLP_RECORD = Iri("http://dblp.rkbexplorer.com/id/conf/birthday/DaviesWS11")


@pytest.fixture
def scenario_links(scenario):
    spec, source, target = scenario
    from lodlink.matcher import LinkingTask

    return generate_links(LinkingTask("t1", source, target, spec.rule))


class TestInjectLinks:
    def test_adds_link_triples(self, initial_graph, scenario_links):
        out, report = inject_links(initial_graph, scenario_links)
        assert Triple(PAPER, OWL_SAME_AS, DBLP_RECORD) in out
        assert len(out) == len(initial_graph) + 1
        assert report.mode is EnrichmentMode.LINKS_ONLY
        assert [origin for _, origin in report.added] == ["t1"]

    def test_matches_frozen_fixture(self, initial_graph, scenario_links, texts):
        out, _ = inject_links(initial_graph, scenario_links)
        expected = parse(texts["enriched_links_only.ttl"], FormatTag.TURTLE)
        assert isomorphic(out, expected)

    def test_input_graph_untouched(self, initial_graph, scenario_links):
        before = len(initial_graph)
        inject_links(initial_graph, scenario_links)
        assert len(initial_graph) == before

    def test_idempotent(self, initial_graph, scenario_links):
        once, _ = inject_links(initial_graph, scenario_links)
        twice, report = inject_links(once, scenario_links)
        assert len(twice) == len(once)
        assert report.added == ()
        assert [reason for _, reason in report.skipped] == ["ALREADY_PRESENT"]

    def test_rejected_links_are_not_injected(self, initial_graph, scenario_links):
        rejected = LinkSet("t1", tuple(l.with_verdict(Verdict.REJECTED) for l in scenario_links.links))
        out, report = inject_links(initial_graph, rejected)
        assert len(out) == len(initial_graph)
        assert report.added == () and report.skipped == ()

    def test_owl_prefix_bound(self, scenario_links):
        bare = Graph()
        bare.add(Triple(PAPER, DCT_TITLE, Literal("x")))
        out, _ = inject_links(bare, scenario_links)
        assert "owl" in out.prefixes


class TestMergeMetadata:
    def test_matches_frozen_fixture(self, initial_graph, scenario_links, registry, texts):
        out, report = merge_metadata(initial_graph, scenario_links, [registry.get("ds2")])
        expected = parse(texts["enriched_merged.ttl"], FormatTag.TURTLE)
        assert isomorphic(out, expected)
        assert report.mode is EnrichmentMode.MERGE

    def test_adds_journal_and_web_address(self, initial_graph, scenario_links, registry):
        out, _ = merge_metadata(initial_graph, scenario_links, [registry.get("ds2")])
        journal = out.objects(PAPER, Iri(AKT_NS + "article-of-journal"))
        assert journal == {Literal("Foundations for the Web of Information and Services")}
        address = out.objects(PAPER, Iri(AKT_NS + "has-web-address"))
        assert address == {Literal("http://dx.doi.org/10.1007/978-3-642-19797-0_25")}

    def test_denied_properties_never_copied(self, initial_graph, scenario_links, registry):
        out, _ = merge_metadata(initial_graph, scenario_links, [registry.get("ds2")])
        # the target record's own title/date/author fields stay with the target
        assert out.objects(PAPER, Iri(AKT_NS + "has-title")) == set()
        assert out.objects(PAPER, Iri(AKT_NS + "has-date")) == set()
        assert out.objects(PAPER, Iri(AKT_NS + "has-author")) == set()
        assert out.objects(PAPER, RDF_TYPE) == set()

    def test_link_predicate_not_recopied(self, initial_graph, scenario_links, registry):
        # the dblp record carries its own owl:sameAs; only the task's link lands
        out, _ = merge_metadata(initial_graph, scenario_links, [registry.get("ds2")])
        assert out.objects(PAPER, OWL_SAME_AS) == {DBLP_RECORD}

    def test_no_label_resources_skipped(self, initial_graph, scenario_links, registry):
        _, report = merge_metadata(initial_graph, scenario_links, [registry.get("ds2")])
        reasons = [reason for _, reason in report.skipped]
        assert "NO_LABEL" in reasons
        no_label = [t for t, reason in report.skipped if reason == "NO_LABEL"]
        assert no_label[0].predicate == Iri(AKT_NS + "cites-publication-reference")

    def test_second_run_skips_duplicates(self, initial_graph, scenario_links, registry):
        once, first = merge_metadata(initial_graph, scenario_links, [registry.get("ds2")])
        twice, second = merge_metadata(once, scenario_links, [registry.get("ds2")])
        assert len(twice) == len(once)
        assert second.added == ()
        reasons = {reason for _, reason in second.skipped}
        assert "DUPLICATE_VALUE" in reasons or "ALREADY_PRESENT" in reasons

    def test_monotone(self, initial_graph, scenario_links, registry):
        out, _ = merge_metadata(initial_graph, scenario_links, [registry.get("ds2")])
        assert initial_graph.triples() <= out.triples()

    def test_duplicate_values_normalized(self, scenario_links, registry):
        # a value differing only in case/whitespace counts as already present
        g = Graph()
        g.add(Triple(PAPER, DCT_TITLE, Literal("x")))
        g.add(
            Triple(
                PAPER,
                Iri(EX + "journalName"),
                Literal("  FOUNDATIONS for the Web of Information and Services  "),
            )
        )
        _, report = merge_metadata(g, scenario_links, [registry.get("ds2")])
        dupes = [t for t, reason in report.skipped if reason == "DUPLICATE_VALUE"]
        assert any(
            t.predicate == Iri(AKT_NS + "article-of-journal") for t in dupes
        )

    def test_unresolvable_target(self, initial_graph, registry):
        stray = LinkSet("t1", (Link(PAPER, OWL_SAME_AS, Iri(EX + "nowhere"), 1.0),))
        with pytest.raises(UnresolvableLinkTarget) as err:
            merge_metadata(initial_graph, stray, [registry.get("ds2")])
        assert err.value.iri == Iri(EX + "nowhere")

    def test_multiple_target_sources(self, initial_graph, scenario_links, registry):
        # resolution scans sources in order; unrelated ones are fine to include
        out, _ = merge_metadata(
            initial_graph, scenario_links, [registry.get("ds3"), registry.get("ds2")]
        )
        assert out.objects(PAPER, Iri(AKT_NS + "has-web-address")) != set()

    def test_include_list_restricts(self, initial_graph, scenario_links, registry):
        policy = MergePolicy(include_properties=frozenset({Iri(AKT_NS + "has-web-address")}))
        out, _ = merge_metadata(initial_graph, scenario_links, [registry.get("ds2")], policy)
        assert out.objects(PAPER, Iri(AKT_NS + "has-web-address")) != set()
        assert out.objects(PAPER, Iri(AKT_NS + "article-of-journal")) == set()

    def test_flatten_disabled_copies_iris(self, initial_graph, scenario_links, registry):
        policy = MergePolicy(flatten_resources=False)
        out, report = merge_metadata(initial_graph, scenario_links, [registry.get("ds2")], policy)
        journal = out.objects(PAPER, Iri(AKT_NS + "article-of-journal"))
        assert journal == {Iri("http://dblp.rkbexplorer.com/id/journals/fis/fis2011")}
        # blank nodes are never copied raw
        assert all(reason != "NO_LABEL" for _, reason in report.skipped)

    def test_label_priority_order(self, scenario_links):
        # a target resource with two label candidates flattens to the higher-priority one
        target_graph = Graph()
        record = DBLP_RECORD
        venue = Iri(EX + "venue")
        target_graph.add(Triple(record, Iri(EX + "venue"), venue))
        target_graph.add(Triple(venue, Iri("http://purl.org/dc/elements/1.1/title"), Literal("dc title")))
        target_graph.add(Triple(venue, Iri("http://www.w3.org/2000/01/rdf-schema#label"), Literal("rdfs label")))
        target = DataSource("ds9", "synthetic", target_graph, FormatTag.TURTLE)
        g = Graph()
        g.add(Triple(PAPER, DCT_TITLE, Literal("x")))
        out, _ = merge_metadata(g, scenario_links, [target])
        assert out.objects(PAPER, Iri(EX + "venue")) == {Literal("rdfs label")}

    def test_include_exclude_clash(self):
        with pytest.raises(ValueError):
            MergePolicy(
                include_properties=frozenset({DCT_TITLE}),
                exclude_properties=frozenset({DCT_TITLE}),
            )


class TestPolicyParsing:
    def test_defaults(self):
        policy = parse_merge_policy("{}")
        assert policy.include_properties is None
        assert policy.exclude_properties == DEFAULT_EXCLUDED_PROPERTIES
        assert policy.flatten_resources is True

    def test_full_document(self):
        text = """
        {
          "prefixes": {"akt": "http://www.aktors.org/ontology/portal#"},
          "includeProperties": ["akt:has-web-address", "<http://example.org/p>"],
          "flattenResources": false,
          "labelPriority": ["rdfs:label"]
        }
        """
        policy = parse_merge_policy(text)
        assert Iri(AKT_NS + "has-web-address") in policy.include_properties
        assert Iri(EX + "p") in policy.include_properties
        assert policy.flatten_resources is False
        assert policy.label_priority == (Iri("http://www.w3.org/2000/01/rdf-schema#label"),)

    def test_exclude_replaces_default(self):
        policy = parse_merge_policy('{"excludeProperties": []}')
        assert policy.exclude_properties == frozenset()

    @pytest.mark.parametrize(
        "text",
        [
            "not json",
            "[1, 2]",
            '{"surprise": 1}',
            '{"includeProperties": "p"}',
            '{"includeProperties": [42]}',
            '{"prefixes": {"x": "not absolute"}}',
            '{"labelPriority": "rdfs:label"}',
            '{"includeProperties": ["not an iri"]}',
        ],
    )
    def test_malformed(self, text):
        with pytest.raises(PolicyError):
            parse_merge_policy(text)

    def test_clash_reported_as_policy_error(self):
        text = '{"includeProperties": ["<http://x.example/p>"], "excludeProperties": ["<http://x.example/p>"]}'
        with pytest.raises(PolicyError):
            parse_merge_policy(text)


class TestProvenance:
    def test_one_line_per_added_triple(self, initial_graph, scenario_links, registry):
        _, report = merge_metadata(initial_graph, scenario_links, [registry.get("ds2")])
        text = render_provenance(report, {"t1": "task t1", "ds2": "dblp"})
        lines = text.splitlines()
        assert len(lines) == len(report.added)
        assert lines[0].endswith("\ttask t1")
        assert all("\t" in line for line in lines)
        assert any(line.endswith("\tdblp") for line in lines)

    def test_unlabelled_origins_fall_back_to_ids(self, initial_graph, scenario_links):
        out, report = inject_links(initial_graph, scenario_links)
        text = render_provenance(report)
        assert text.endswith("\tt1\n")

    def test_empty_report(self, initial_graph, scenario_links):
        _, report = inject_links(
            initial_graph,
            LinkSet("t1", tuple(l.with_verdict(Verdict.REJECTED) for l in scenario_links.links)),
        )
        assert render_provenance(report) == ""
