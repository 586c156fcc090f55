//! Intent inventory and sentence templates. `{type}` marks an entity slot.

pub const ENTITY_TYPES: [&str; 14] = [
    "city",
    "state",
    "country",
    "degree",
    "course",
    "exam",
    "college",
    "university",
    "coaching_institute",
    "company",
    "job_role",
    "skill",
    "scholarship",
    "year",
];

pub struct SubcategorySpec {
    pub name: &'static str,
    /// Relative sampling weight.
    pub weight: f64,
    pub templates: &'static [&'static str],
}

pub struct CategorySpec {
    pub name: &'static str,
    pub subcategories: &'static [SubcategorySpec],
}

pub const CATEGORIES: &[CategorySpec] = &[
    CategorySpec {
        name: "Colleges",
        subcategories: &[
            SubcategorySpec {
                name: "Find Colleges",
                weight: 1.2,
                templates: &[
                    "show me some colleges near {city} for {degree}",
                    "top {degree} colleges in {state}",
                    "best colleges in {city} for {course}",
                    "tell me about {college}",
                    "is {university} good for {course}",
                    "list of {degree} colleges in {city}",
                    "which is the best college for {course} in {state}",
                    "good colleges for {degree} near {city}",
                    "tell me about {university}",
                ],
            },
            SubcategorySpec {
                name: "College Fees",
                weight: 1.0,
                templates: &[
                    "fee structure of {college}",
                    "what is the {degree} fees at {university}",
                    "how much does {college} charge for {course}",
                    "total fees for {degree} in {college}",
                    "is {university} expensive",
                    "hostel fees of {college}",
                ],
            },
            SubcategorySpec {
                name: "College Admission",
                weight: 1.0,
                templates: &[
                    "how to get admission in {college}",
                    "admission process of {university} for {degree}",
                    "what is the cut off for {college}",
                    "{exam} score needed for {college}",
                    "how can i join {university}",
                    "when does admission start in {college} for {year}",
                    "documents required for admission in {university}",
                ],
            },
        ],
    },
    CategorySpec {
        name: "Coaching",
        subcategories: &[
            SubcategorySpec {
                name: "Find Coaching",
                weight: 1.0,
                templates: &[
                    "best coaching for {exam} in {city}",
                    "tell me about {coaching_institute}",
                    "is {coaching_institute} good for {exam}",
                    "coaching centres for {exam} near {city}",
                    "how can i join {coaching_institute}",
                    "which coaching is best for {exam} preparation",
                ],
            },
            SubcategorySpec {
                name: "Coaching Fees",
                weight: 0.9,
                templates: &[
                    "fee structure of {coaching_institute}",
                    "how much does {coaching_institute} charge for {exam} coaching",
                    "total fees for {exam} coaching in {city}",
                    "is {coaching_institute} expensive",
                    "fees of {coaching_institute} for {exam}",
                ],
            },
        ],
    },
    CategorySpec {
        name: "Exams",
        subcategories: &[
            SubcategorySpec {
                name: "Exam Dates",
                weight: 1.0,
                templates: &[
                    "when is {exam} {year}",
                    "{exam} {year} exam date",
                    "last date to apply for {exam}",
                    "when will the {exam} form come out",
                    "exam schedule of {exam} {year}",
                    "how to apply for {exam}",
                ],
            },
            SubcategorySpec {
                name: "Exam Eligibility",
                weight: 1.0,
                templates: &[
                    "eligibility for {exam}",
                    "can i give {exam} after {degree}",
                    "who can apply for {exam}",
                    "tell me about {exam}",
                    "age limit for {exam} {year}",
                    "am i eligible for {exam} after {degree}",
                ],
            },
            SubcategorySpec {
                name: "Exam Results",
                weight: 0.9,
                templates: &[
                    "{exam} {year} result",
                    "when will {exam} results be declared",
                    "how to check my {exam} score",
                    "{exam} result date {year}",
                    "is the {exam} result out",
                ],
            },
        ],
    },
    CategorySpec {
        name: "Courses",
        subcategories: &[
            SubcategorySpec {
                name: "Course Details",
                weight: 1.0,
                templates: &[
                    "syllabus of {course}",
                    "subjects in {course}",
                    "tell me about {course}",
                    "what will i study in {degree}",
                    "is {course} a good option after {degree}",
                    "scope of {course} in {country}",
                ],
            },
            SubcategorySpec {
                name: "Course Duration",
                weight: 0.9,
                templates: &[
                    "how many years is {degree}",
                    "duration of {course}",
                    "how long does {degree} take",
                    "can i finish {course} in one year",
                    "duration of {degree} in {course}",
                ],
            },
        ],
    },
    CategorySpec {
        name: "Jobs",
        subcategories: &[
            SubcategorySpec {
                name: "Job Search",
                weight: 1.0,
                templates: &[
                    "jobs for {job_role} in {city}",
                    "{company} hiring {job_role}",
                    "openings at {company}",
                    "tell me about {company}",
                    "how to get a job at {company}",
                    "{job_role} vacancies in {city} for freshers",
                    "jobs after {degree} in {city}",
                ],
            },
            SubcategorySpec {
                name: "Salary",
                weight: 0.9,
                templates: &[
                    "salary of {job_role} at {company}",
                    "how much does a {job_role} earn",
                    "average salary after {degree}",
                    "starting salary of {job_role} in {city}",
                    "what does {company} pay a {job_role}",
                ],
            },
            SubcategorySpec {
                name: "Placements",
                weight: 0.9,
                templates: &[
                    "placement record of {college}",
                    "which companies visit {college} for placements",
                    "highest package at {university}",
                    "does {company} recruit from {college}",
                    "average placement package of {university} for {degree}",
                ],
            },
            SubcategorySpec {
                name: "Internships",
                weight: 0.9,
                templates: &[
                    "internship at {company}",
                    "summer internship for {degree} students",
                    "{skill} internship in {city}",
                    "how to get an internship at {company}",
                    "paid internships for {job_role} in {city}",
                ],
            },
        ],
    },
    CategorySpec {
        name: "Scholarships",
        subcategories: &[
            SubcategorySpec {
                name: "Find Scholarships",
                weight: 1.0,
                templates: &[
                    "scholarships for {degree} students in {state}",
                    "tell me about {scholarship}",
                    "how to apply for {scholarship}",
                    "last date to apply for {scholarship}",
                    "scholarships for {course} in {country}",
                ],
            },
            SubcategorySpec {
                name: "Scholarship Eligibility",
                weight: 0.9,
                templates: &[
                    "eligibility for {scholarship}",
                    "who can apply for {scholarship}",
                    "am i eligible for {scholarship} after {degree}",
                    "income limit for {scholarship}",
                    "can {degree} students get {scholarship}",
                ],
            },
        ],
    },
    CategorySpec {
        name: "Study Abroad",
        subcategories: &[SubcategorySpec {
            name: "Study Abroad",
            weight: 1.1,
            templates: &[
                "study {course} in {country}",
                "universities in {country} for {degree}",
                "how to study in {country} after {degree}",
                "is {exam} required to study in {country}",
                "cost of studying {course} in {country}",
                "tell me about {university} in {country}",
            ],
        }],
    },
    CategorySpec {
        name: "Skills",
        subcategories: &[SubcategorySpec {
            name: "Learn Skills",
            weight: 1.0,
            templates: &[
                "how to learn {skill}",
                "best way to learn {skill}",
                "{skill} classes in {city}",
                "tell me about {skill}",
                "is {skill} useful for a {job_role}",
                "where can i learn {skill} online",
            ],
        }],
    },
    CategorySpec {
        name: "Counselling",
        subcategories: &[SubcategorySpec {
            name: "Career Counselling",
            weight: 1.0,
            templates: &[
                "which career is right for me after {degree}",
                "should i choose {course} or {course}",
                "confused between {degree} and {degree}",
                "what should i do after {degree}",
                "is {job_role} a good career",
                "career options after {course}",
            ],
        }],
    },
];

/// Starter rules: `(category, subcategory, kind, pattern, priority)`.
pub const RULES: &[(&str, &str, &str, &str, i64)] = &[
    ("Exams", "Exam Results", "keyword", "result", 5),
    ("Exams", "Exam Results", "keyword", "results", 5),
    ("Exams", "Exam Dates", "phrase", "exam date", 4),
    ("Jobs", "Salary", "keyword", "salary", 5),
    ("Jobs", "Internships", "keyword", "internship", 5),
    ("Jobs", "Placements", "keyword", "placements", 5),
    ("Colleges", "College Fees", "phrase", "fee structure of <college>", 6),
    ("Coaching", "Coaching Fees", "phrase", "fee structure of <coaching_institute>", 6),
    ("Courses", "Course Duration", "keyword", "duration", 4),
    ("Scholarships", "Scholarship Eligibility", "keyword", "eligibility", 3),
];
