//! The eleven boundary cases, as citation records plus a hybrid classifier
//! whose model double answers only what local evidence leaves open.

use std::sync::Arc;

use epiaudit::parsing::CitationRecord;
use epiaudit::taxonomy::mock::ScriptedLlmClient;
use epiaudit::taxonomy::{Classifier, ClassifierMode, FixtureResolver, Resolution};
use epiaudit::EpistemicCategory::{self, *};

pub struct Case {
    pub name: &'static str,
    pub citation: CitationRecord,
    pub expected: EpistemicCategory,
}

fn rec(text: &str, url: &str) -> CitationRecord {
    CitationRecord::new(0, text, vec![url.to_string()], None)
}

pub const WEALTH_URL: &str = "https://en.wikipedia.org/wiki/The_Wealth_of_Nations";

pub fn cases() -> Vec<Case> {
    vec![
        Case {
            name: "news outlet factual article",
            citation: rec(
                "Doe, J. (2024). \"Fed holds rates steady\". The Wall Street Journal.",
                "https://www.wsj.com/economy/central-banking/fed-holds-rates-steady-1234",
            ),
            expected: News,
        },
        Case {
            name: "news outlet op-ed",
            citation: rec(
                "Roe, K. (2024). \"The case for lower rates\". The Wall Street Journal.",
                "https://www.wsj.com/opinion/the-case-for-lower-rates-5678",
            ),
            expected: Opinion,
        },
        Case {
            name: "company technology blog",
            citation: rec("\"How Autopilot works\". Tesla.", "https://www.tesla.com/blog/how-autopilot-works"),
            expected: Corporate,
        },
        Case {
            name: "encyclopedia page on a general topic",
            citation: rec("\"History of Japan\". Wikipedia.", "https://en.wikipedia.org/wiki/History_of_Japan"),
            expected: ReferenceTertiary,
        },
        Case {
            name: "encyclopedia page on a specific book",
            citation: rec("\"The Wealth of Nations\". Wikipedia.", WEALTH_URL),
            expected: Academic,
        },
        Case {
            name: "journalist post breaking news",
            citation: rec(
                "@jane_reporter (Reuters correspondent): BREAKING: explosion reported at the port, officials confirm.",
                "https://twitter.com/jane_reporter/status/1001",
            ),
            expected: News,
        },
        Case {
            name: "journalist post with an opinion",
            citation: rec(
                "@jane_reporter: In my view the new port policy is a mistake.",
                "https://twitter.com/jane_reporter/status/1002",
            ),
            expected: Opinion,
        },
        Case {
            name: "post by a random user",
            citation: rec("@cat_fan_99: lol this is wild", "https://twitter.com/cat_fan_99/status/1003"),
            expected: Ugc,
        },
        Case {
            name: "public radio news report",
            citation: rec(
                "\"Senate passes budget bill\". NPR. 1 May 2024.",
                "https://www.npr.org/2024/05/01/1234/senate-passes-budget-bill",
            ),
            expected: News,
        },
        Case {
            name: "university press release",
            citation: rec(
                "\"Stanford opens new climate center\". University press release. Stanford University.",
                "https://news.stanford.edu/press-releases/2024/01/10/climate-center/",
            ),
            expected: Corporate,
        },
        Case {
            name: "researcher personal blog",
            citation: rec(
                "Doe, J. \"Thoughts on entropy\". Personal blog.",
                "https://people.example.edu/~jdoe/blog/entropy.html",
            ),
            expected: Ugc,
        },
    ]
}

pub fn wealth_work() -> CitationRecord {
    CitationRecord::new(
        0,
        "The Wealth of Nations. Author: Adam Smith; Publisher: W. Strahan and T. Cadell; Publication date: 1776",
        vec![],
        Some("The Wealth of Nations".into()),
    )
}

pub fn client() -> ScriptedLlmClient {
    ScriptedLlmClient::new()
        .yes_at("Wealth of Nations. Author", 1)
        .yes_at("BREAKING", 4)
        .yes_at("In my view", 5)
        .yes_at("@cat_fan_99", 8)
}

pub fn resolver() -> FixtureResolver {
    FixtureResolver::new().with(WEALTH_URL, Resolution::SpecificWork(wealth_work()))
}

pub fn classifier() -> Classifier {
    Classifier::new(ClassifierMode::Hybrid, Some(Arc::new(client())), Arc::new(resolver()))
}
